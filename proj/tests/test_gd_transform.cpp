#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "gdcan/error.hpp"
#include "gdcan/gd_transform.hpp"
#include "test_util.hpp"

namespace gdcan {
namespace {

std::vector<Bits> all_chunks(const CodeParams& code) {
    std::vector<Bits> out;
    const auto n = code.chunk_bits();
    for (unsigned v = 0; v < (1u << n); ++v) {
        Bits b(n);
        for (std::size_t i = 0; i < n; ++i)
            b.set(i, (v >> (n - 1 - i)) & 1u);
        out.push_back(b);
    }
    return out;
}

TEST(ToBasisDeviation, SevenFourExamples) {
    const auto code = build_code(3, 0);
    auto zero = to_basis_deviation(Bits::from_string("0000000"), code);
    EXPECT_EQ(zero.basis.to_string(), "0000");
    EXPECT_EQ(zero.deviation, 0u);

    auto parity_flip = to_basis_deviation(Bits::from_string("0000100"), code);
    EXPECT_EQ(parity_flip.basis.to_string(), "0000");
    EXPECT_EQ(syndrome_to_string(parity_flip.deviation, 3), "100");

    // 1000000 is one message-bit away from the zero codeword.
    auto message_flip = to_basis_deviation(Bits::from_string("1000000"), code);
    EXPECT_EQ(message_flip.basis.to_string(), "0000");
    EXPECT_EQ(syndrome_to_string(message_flip.deviation, 3), "110");
}

TEST(FromBasisDeviation, SevenFourExamples) {
    const auto code = build_code(3, 0);
    EXPECT_EQ(from_basis_deviation({Bits::from_string("0000"), 0}, code).to_string(), "0000000");
    EXPECT_EQ(from_basis_deviation({Bits::from_string("0000"), 0b001}, code).to_string(), "0000100");
}

TEST(ToBasisDeviation, RemovedColumnKeepsMessageBits) {
    const auto code = build_code(3, 1);
    ASSERT_EQ(code.removed_columns(), std::vector<std::uint16_t>{7});
    std::size_t rule3 = 0;
    for (const auto& chunk : all_chunks(code)) {
        const auto s = syndrome(chunk, code);
        if (code.classify(s).cls != SyndromeClass::Removed)
            continue;
        ++rule3;
        const auto pair = to_basis_deviation(chunk, code);
        EXPECT_EQ(pair.basis, chunk.prefix(3));
        EXPECT_EQ(pair.deviation, 7u);
        EXPECT_EQ(from_basis_deviation(pair, code), chunk);
    }
    // 64 chunks = 8 codewords x (1 + 6 single flips) + 8 removed-column chunks.
    EXPECT_EQ(rule3, 8u);
}

TEST(GdTransform, ExhaustiveBijection) {
    for (const auto& [code, codewords] : {std::pair{build_code(3, 0), 16u}, std::pair{build_code(3, 1), 8u}}) {
        std::set<std::pair<std::string, Syndrome>> images;
        unsigned zero_deviation = 0;
        for (const auto& chunk : all_chunks(code)) {
            const auto pair = to_basis_deviation(chunk, code);
            EXPECT_EQ(pair.basis.size(), code.basis_bits());
            EXPECT_LT(pair.deviation, 1u << code.m());
            EXPECT_TRUE(images.emplace(pair.basis.to_string(), pair.deviation).second) << "collision";
            EXPECT_EQ(from_basis_deviation(pair, code), chunk);
            EXPECT_EQ(pair.deviation == 0, syndrome(chunk, code) == 0);
            zero_deviation += pair.deviation == 0;
        }
        EXPECT_EQ(images.size(), std::size_t{1} << code.chunk_bits());
        EXPECT_EQ(zero_deviation, codewords);
    }
}

TEST(GdTransform, SingleFlipsClusterOnOneBasis) {
    std::mt19937_64 rng(3);
    for (auto code : {build_code(7, 15), build_code(8, 39)}) {
        const auto basis = test::random_bits(code.basis_bits(), rng);
        const auto w = test::codeword(basis, code);
        EXPECT_EQ(to_basis_deviation(w, code).basis, basis);
        for (std::size_t j = 0; j < code.chunk_bits(); ++j) {
            auto c = w;
            c.flip(j);
            EXPECT_EQ(to_basis_deviation(c, code).basis, basis) << "flip " << j;
        }
    }
}

TEST(GdTransform, RandomRoundTripPaperCodes) {
    std::mt19937_64 rng(99);
    for (auto code : {build_code(7, 15), build_code(8, 39)}) {
        for (int i = 0; i < 100000; ++i) {
            const auto chunk = test::random_bits(code.chunk_bits(), rng);
            ASSERT_EQ(from_basis_deviation(to_basis_deviation(chunk, code), code), chunk);
        }
    }
}

TEST(GdTransform, RejectsBadLengths) {
    const auto code = build_code(3, 0);
    EXPECT_THROW(to_basis_deviation(Bits(6), code), Error);
    EXPECT_THROW(from_basis_deviation({Bits(3), 0}, code), Error);
    EXPECT_THROW(from_basis_deviation({Bits(4), 8}, code), Error);
}

} // namespace
} // namespace gdcan
