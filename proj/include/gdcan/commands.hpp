#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gdcan/dynamic_dict.hpp"
#include "gdcan/fingerprint.hpp"
#include "gdcan/preset_dict.hpp"
#include "gdcan/record.hpp"
#include "gdcan/stream_codec.hpp"

namespace gdcan::cli {

namespace fs = std::filesystem;

enum class ReportFormat { Text, Kv };

struct RunConfig {
    Mode mode = Mode::RamOnly;
    std::size_t ram_budget = 20 * 1024;
    std::optional<std::size_t> flash_budget; // train: required; compress: upper bound on dictionary size
    ChunkingConfig chunking = ChunkingConfig::half_row();
    FingerprintAlgo algo = FingerprintAlgo::Crc32;
    Accounting accounting = Accounting::Uniform;
    std::optional<fs::path> dict_path;
    std::optional<fs::path> dict_out;
    bool delta_timestamps = true;
    bool verify_on_match = false;
    ReportFormat report = ReportFormat::Text;

    CodecConfig codec_config() const;
};

/// Throws Error(Config) for mode/dictionary combinations that cannot run.
void validate_for_compress(const RunConfig& config);

/// "4096", "10k", "10kB", "1M" (binary multiples).
std::size_t parse_byte_size(const std::string& text);

/// .mf4 files are recognised by their identification block, anything else is a raw .gdr log.
std::vector<CanRecord> load_records(const fs::path& path);

/// Chunks exactly as the compressor will see them.
std::vector<Bits> prepare_chunks(std::span<const CanRecord> records, const RunConfig& config);

void print_report(const SizeReport& report, ReportFormat format, std::ostream& out);

SizeReport cmd_compress(const fs::path& input, const fs::path& output, const RunConfig& config, std::ostream& out);

/// Writes a .gdr log, or an MDF4 fixture when output ends in ".mf4".
/// Returns the number of records written.
std::uint64_t cmd_decompress(const fs::path& input, const fs::path& output, const std::optional<fs::path>& dict,
                             std::ostream& out);

/// Writes <prefix>.gdpd (compressor side) and <prefix>.gdpb (decompressor side).
PresetDictionary cmd_train(const std::vector<fs::path>& inputs, const fs::path& prefix, const RunConfig& config,
                           std::ostream& out);

struct BenchGrid {
    std::vector<Mode> modes{Mode::RamOnly, Mode::FlashOnly, Mode::Hybrid};
    std::vector<std::size_t> ram_budgets{1024, 20 * 1024, 100 * 1024};
    std::vector<std::size_t> flash_budgets{0, 10 * 1024, 100 * 1024};
    std::vector<fs::path> training_set; // empty: train on the inputs themselves
    std::vector<std::string> external;  // shell commands reading raw records on stdin
};

struct GainStats {
    double avg = 0;
    double min = 0;
    double max = 0;
    std::size_t files = 0;
};

struct BenchRow {
    Mode mode;
    std::size_t ram_budget;
    std::size_t flash_budget;
    GainStats gain;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    std::vector<std::pair<std::string, GainStats>> external; // only tools that ran on every file
};

BenchResult cmd_bench(const std::vector<fs::path>& inputs, const BenchGrid& grid, const RunConfig& base,
                      std::ostream& out, std::ostream& err);

/// Full command line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace gdcan::cli
