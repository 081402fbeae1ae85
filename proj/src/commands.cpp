#include "gdcan/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <iomanip>
#include <limits>
#include <sstream>

#include <unistd.h>

#include <CLI11.hpp>

#include "byte_io.hpp"
#include "gdcan/error.hpp"
#include "gdcan/mdf4.hpp"
#include "gdcan/synthetic.hpp"

namespace gdcan::cli {

CodecConfig RunConfig::codec_config() const {
    CodecConfig c;
    c.mode = mode;
    c.chunking = chunking;
    c.algo = algo;
    c.ram_budget = ram_budget;
    c.accounting = accounting;
    c.verify_on_match = verify_on_match;
    c.delta_timestamps = delta_timestamps;
    return c;
}

void validate_for_compress(const RunConfig& config) {
    if (config.mode == Mode::RamOnly && config.dict_path)
        throw Error(ErrorKind::Config, "ram mode does not use a preset dictionary (drop --dict)");
    if (config.mode != Mode::RamOnly && !config.dict_path)
        throw Error(ErrorKind::Config, std::string(mode_name(config.mode)) + " mode requires --dict");
}

std::size_t parse_byte_size(const std::string& text) {
    std::size_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{})
        throw Error(ErrorKind::Config, "bad byte size '" + text + "'");
    std::string suffix(end, text.data() + text.size());
    std::transform(suffix.begin(), suffix.end(), suffix.begin(), [](unsigned char c) { return std::tolower(c); });
    if (suffix.empty() || suffix == "b")
        return value;
    if (suffix == "k" || suffix == "kb")
        return value * 1024;
    if (suffix == "m" || suffix == "mb")
        return value * 1024 * 1024;
    throw Error(ErrorKind::Config, "bad byte size suffix in '" + text + "'");
}

std::vector<CanRecord> load_records(const fs::path& path) {
    const auto bytes = detail::read_file(path);
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), "MDF     ", 8) == 0)
        return parse_records(mdf4::extract_records(mdf4::parse(bytes)).bytes);
    if (path.extension() == ".mf4" || path.extension() == ".MF4")
        throw Error(ErrorKind::NotMdf4, path.string() + " lacks an MDF identification block");
    return parse_records(bytes);
}

std::vector<Bits> prepare_chunks(std::span<const CanRecord> records, const RunConfig& config) {
    if (config.delta_timestamps)
        return records_to_chunks(delta_encode_timestamps(records), config.chunking);
    return records_to_chunks(records, config.chunking);
}

namespace {

std::string format_gain(const std::optional<double>& gain) {
    if (!gain)
        return "n/a";
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << *gain;
    return s.str();
}

std::string hex64(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << v;
    return s.str();
}

PresetDictionary load_compressor_dictionary(const RunConfig& config) {
    auto dict = PresetDictionary::load(*config.dict_path);
    if (config.flash_budget && dict.size() * fingerprint_length(dict.algo()) > *config.flash_budget)
        throw Error(ErrorKind::Config, "dictionary needs " +
                                           std::to_string(dict.size() * fingerprint_length(dict.algo())) +
                                           " B of flash, budget is " + std::to_string(*config.flash_budget));
    return dict;
}

} // namespace

void print_report(const SizeReport& r, ReportFormat format, std::ostream& out) {
    const auto raw = r.record_count * kRecordSize;
    if (format == ReportFormat::Kv) {
        out << "mode=" << mode_name(r.mode) << '\n'
            << "records=" << r.record_count << '\n'
            << "raw_bytes=" << raw << '\n'
            << "compressed_bytes=" << r.total_bytes << '\n'
            << "gain=" << format_gain(r.gain) << '\n'
            << "ref_primary=" << r.tokens.ref_primary << '\n'
            << "ref_ram=" << r.tokens.ref_ram << '\n'
            << "new_basis=" << r.tokens.new_basis << '\n'
            << "resets=" << r.tokens.resets << '\n'
            << "id_bytes=" << r.id_bytes << '\n'
            << "basis_bytes=" << r.basis_bytes << '\n'
            << "deviation_bytes=" << r.deviation_bytes << '\n'
            << "control_bytes=" << r.control_bytes << '\n';
        return;
    }
    out << "mode:              " << mode_name(r.mode) << '\n'
        << "records:           " << r.record_count << " (" << raw << " B raw)\n"
        << "compressed:        " << r.total_bytes << " B\n"
        << "gain:              " << format_gain(r.gain) << '\n'
        << "tokens:            " << r.tokens.ref_primary << " primary refs, " << r.tokens.ref_ram << " RAM refs, "
        << r.tokens.new_basis << " new bases, " << r.tokens.resets << " resets\n"
        << "bytes by role:     ids " << r.id_bytes << ", bases " << r.basis_bytes << ", deviations "
        << r.deviation_bytes << ", control " << r.control_bytes << ", header " << StreamHeader::kSize << '\n';
}

SizeReport cmd_compress(const fs::path& input, const fs::path& output, const RunConfig& config, std::ostream& out) {
    validate_for_compress(config);
    const auto records = load_records(input);
    std::optional<PresetDictionary> dict;
    if (config.mode != Mode::RamOnly)
        dict = load_compressor_dictionary(config);
    const auto container = compress_records(records, config.codec_config(), dict ? &*dict : nullptr);
    detail::write_file(output, container);
    const auto report = compressed_size_report(container);
    print_report(report, config.report, out);
    return report;
}

std::uint64_t cmd_decompress(const fs::path& input, const fs::path& output, const std::optional<fs::path>& dict_path,
                             std::ostream& out) {
    const auto container = detail::read_file(input);
    std::optional<PresetDictionary> dict;
    if (dict_path)
        dict = PresetDictionary::load(*dict_path);
    const auto records = decompress_records(container, dict ? &*dict : nullptr);
    if (output.extension() == ".mf4")
        detail::write_file(output, mdf4::write_fixture(records));
    else
        write_gdr(output, records);
    out << "decompressed " << records.size() << " records to " << output.string() << '\n';
    return records.size();
}

PresetDictionary cmd_train(const std::vector<fs::path>& inputs, const fs::path& prefix, const RunConfig& config,
                           std::ostream& out) {
    if (inputs.empty())
        throw Error(ErrorKind::Config, "train needs at least one input file");
    if (!config.flash_budget)
        throw Error(ErrorKind::Config, "train requires --flash");
    std::vector<std::vector<RankedBasis>> per_file;
    per_file.reserve(inputs.size());
    for (const auto& path : inputs) {
        const auto records = load_records(path);
        per_file.push_back(count_frequencies(prepare_chunks(records, config), config.chunking.code(), config.algo));
    }
    const auto merged = merge_round_robin(per_file);
    auto dict = PresetDictionary::truncate_to_flash(merged, *config.flash_budget, config.chunking.code(), config.algo);

    auto with_ext = [&](const char* ext) {
        auto p = prefix;
        p += ext;
        return p;
    };
    detail::write_file(with_ext(".gdpd"), dict.serialize_compressor_side());
    detail::write_file(with_ext(".gdpb"), dict.serialize_decompressor_side());
    if (config.report == ReportFormat::Kv) {
        out << "entries=" << dict.size() << "\ncandidates=" << merged.size() << "\ndict_id=" << hex64(dict.dict_id())
            << '\n';
    } else {
        out << "trained " << dict.size() << " of " << merged.size() << " candidate fingerprints from "
            << inputs.size() << " file(s), dict_id " << hex64(dict.dict_id()) << '\n';
    }
    return dict;
}

namespace {

GainStats summarize(const std::vector<double>& gains) {
    GainStats s;
    if (gains.empty())
        return s;
    s.files = gains.size();
    s.min = *std::min_element(gains.begin(), gains.end());
    s.max = *std::max_element(gains.begin(), gains.end());
    double sum = 0;
    for (double g : gains)
        sum += g;
    s.avg = sum / static_cast<double>(gains.size());
    return s;
}

/// Runs `command` with `input` on stdin; returns the stdout byte count, or
/// nothing if the tool could not run.
std::optional<std::size_t> external_size(const std::string& command, const fs::path& input) {
    const auto full = command + " < '" + input.string() + "' 2>/dev/null";
    FILE* pipe = ::popen(full.c_str(), "r");
    if (pipe == nullptr)
        return std::nullopt;
    std::size_t total = 0;
    char buf[65536];
    while (const auto n = std::fread(buf, 1, sizeof buf, pipe))
        total += n;
    const int status = ::pclose(pipe);
    if (status != 0 || total == 0)
        return std::nullopt;
    return total;
}

} // namespace

BenchResult cmd_bench(const std::vector<fs::path>& inputs, const BenchGrid& grid, const RunConfig& base,
                      std::ostream& out, std::ostream& err) {
    if (inputs.empty())
        throw Error(ErrorKind::Config, "bench needs at least one input file");

    std::vector<std::vector<CanRecord>> files;
    for (const auto& p : inputs)
        files.push_back(load_records(p));

    const bool needs_dict = std::any_of(grid.modes.begin(), grid.modes.end(), [](Mode m) { return m != Mode::RamOnly; });
    std::vector<RankedBasis> merged;
    if (needs_dict) {
        std::vector<std::vector<RankedBasis>> per_file;
        if (grid.training_set.empty()) {
            for (const auto& recs : files)
                per_file.push_back(count_frequencies(prepare_chunks(recs, base), base.chunking.code(), base.algo));
        } else {
            for (const auto& p : grid.training_set)
                per_file.push_back(
                    count_frequencies(prepare_chunks(load_records(p), base), base.chunking.code(), base.algo));
        }
        merged = merge_round_robin(per_file);
    }

    auto run_config = [&](Mode mode, std::size_t ram, std::size_t flash) {
        auto config = base.codec_config();
        config.mode = mode;
        config.ram_budget = ram;
        std::optional<PresetDictionary> dict;
        if (mode != Mode::RamOnly)
            dict = PresetDictionary::truncate_to_flash(merged, flash, config.chunking.code(), config.algo);
        std::vector<double> gains;
        for (const auto& recs : files) {
            if (recs.empty())
                continue;
            const auto container = compress_records(recs, config, dict ? &*dict : nullptr);
            if (decompress_records(container, dict ? &*dict : nullptr) != recs)
                throw Error(ErrorKind::Corruption, "round trip failed during bench");
            gains.push_back(static_cast<double>(recs.size() * kRecordSize) / static_cast<double>(container.size()));
        }
        return BenchRow{mode, mode == Mode::FlashOnly ? 0 : ram, mode == Mode::RamOnly ? 0 : flash, summarize(gains)};
    };

    BenchResult result;
    for (const auto mode : grid.modes) {
        if (mode == Mode::RamOnly) {
            for (auto ram : grid.ram_budgets)
                result.rows.push_back(run_config(mode, ram, 0));
        } else if (mode == Mode::FlashOnly) {
            for (auto flash : grid.flash_budgets)
                result.rows.push_back(run_config(mode, 0, flash));
        } else {
            for (auto ram : grid.ram_budgets)
                for (auto flash : grid.flash_budgets)
                    result.rows.push_back(run_config(mode, ram, flash));
        }
    }

    if (!grid.external.empty()) {
        const auto tmp = fs::temp_directory_path() / ("gdcan-bench-" + std::to_string(::getpid()) + ".raw");
        std::vector<std::vector<double>> gains(grid.external.size());
        std::vector<bool> ok(grid.external.size(), true);
        for (const auto& recs : files) {
            if (recs.empty())
                continue;
            const auto raw = base.delta_timestamps ? serialize_records(delta_encode_timestamps(recs))
                                                   : serialize_records(recs);
            detail::write_file(tmp, raw);
            for (std::size_t i = 0; i < grid.external.size(); ++i) {
                if (!ok[i])
                    continue;
                if (const auto size = external_size(grid.external[i], tmp))
                    gains[i].push_back(static_cast<double>(raw.size()) / static_cast<double>(*size));
                else
                    ok[i] = false;
            }
        }
        std::error_code ec;
        fs::remove(tmp, ec);
        for (std::size_t i = 0; i < grid.external.size(); ++i) {
            if (ok[i])
                result.external.emplace_back(grid.external[i], summarize(gains[i]));
            else
                err << "warning: external tool '" << grid.external[i] << "' did not run; column omitted\n";
        }
    }

    auto fmt = [](double v) {
        std::ostringstream s;
        s << std::fixed << std::setprecision(3) << v;
        return s.str();
    };
    if (base.report == ReportFormat::Kv) {
        for (const auto& row : result.rows) {
            out << "mode=" << mode_name(row.mode) << " ram=" << row.ram_budget << " flash=" << row.flash_budget
                << " files=" << row.gain.files << " avg=" << fmt(row.gain.avg) << " min=" << fmt(row.gain.min)
                << " max=" << fmt(row.gain.max);
            for (const auto& [name, stats] : result.external)
                out << " external[" << name << "]=" << fmt(stats.avg);
            out << '\n';
        }
        return result;
    }
    out << std::left << std::setw(12) << "mode" << std::right << std::setw(10) << "ram_B" << std::setw(10)
        << "flash_B" << std::setw(7) << "files" << std::setw(9) << "avg" << std::setw(9) << "min" << std::setw(9)
        << "max";
    for (const auto& [name, stats] : result.external)
        out << "  external[" << name << "] avg";
    out << '\n';
    for (const auto& row : result.rows) {
        out << std::left << std::setw(12) << mode_name(row.mode) << std::right << std::setw(10) << row.ram_budget
            << std::setw(10) << row.flash_budget << std::setw(7) << row.gain.files << std::setw(9) << fmt(row.gain.avg)
            << std::setw(9) << fmt(row.gain.min) << std::setw(9) << fmt(row.gain.max);
        for (const auto& [name, stats] : result.external)
            out << "  " << std::setw(static_cast<int>(name.size() + 14)) << fmt(stats.avg);
        out << '\n';
    }
    return result;
}

namespace {

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Parameter: return 2;
    case ErrorKind::Io: return 3;
    case ErrorKind::DictMismatch: return 5;
    case ErrorKind::SpaceExhausted: return 6;
    default: return 4;
    }
}

struct SharedFlags {
    std::string mode = "ram";
    std::string ram = "20k";
    std::string flash;
    std::string chunking = "half";
    std::string fp = "crc32";
    std::string accounting = "uniform";
    std::string dict;
    std::string report = "text";
    bool no_delta_ts = false;
    bool verify = false;

    void attach(CLI::App* cmd, bool codec_flags) {
        cmd->add_option("--chunking", chunking, "half, full or multi:N")->capture_default_str();
        cmd->add_option("--fp", fp, "fingerprint: crc32 or fnv64")->capture_default_str();
        cmd->add_flag("--no-delta-ts", no_delta_ts, "keep absolute timestamps");
        cmd->add_option("--report", report, "text or kv")->capture_default_str();
        cmd->add_option("--flash", flash, "flash budget in bytes (k/M suffixes)");
        if (!codec_flags)
            return;
        cmd->add_option("--mode", mode, "ram, flash or hybrid")->capture_default_str();
        cmd->add_option("--ram", ram, "RAM budget in bytes (k/M suffixes)")->capture_default_str();
        cmd->add_option("--accounting", accounting, "RAM accounting: paper or uniform")->capture_default_str();
        cmd->add_flag("--verify-fp", verify, "keep bases in RAM to reject fingerprint collisions");
    }

    RunConfig to_config() const {
        RunConfig c;
        c.mode = parse_mode(mode);
        c.ram_budget = parse_byte_size(ram);
        if (!flash.empty())
            c.flash_budget = parse_byte_size(flash);
        c.chunking = ChunkingConfig::parse(chunking);
        c.algo = parse_algo(fp);
        c.accounting = parse_accounting(accounting);
        if (!dict.empty())
            c.dict_path = dict;
        c.delta_timestamps = !no_delta_ts;
        c.verify_on_match = verify;
        if (report == "kv")
            c.report = ReportFormat::Kv;
        else if (report != "text")
            throw Error(ErrorKind::Config, "--report must be text or kv");
        return c;
    }
};

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty())
            out.push_back(parse_byte_size(item));
    return out;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"gdcan: generalized-deduplication compression for CAN logs"};
    app.require_subcommand(1);

    SharedFlags flags;
    std::string input, output, dict_out;
    std::vector<std::string> inputs, train_set, external;
    std::string ram_grid = "1k,20k,100k", flash_grid = "0,10k,100k", modes = "ram,flash,hybrid";
    std::size_t synth_records = 10000;
    std::uint64_t synth_seed = 1;

    auto* compress = app.add_subcommand("compress", "compress a .mf4 or .gdr log into a .gdcb container");
    compress->add_option("input", input, "input .mf4 or .gdr")->required();
    compress->add_option("-o,--output", output, "output .gdcb")->required();
    compress->add_option("--dict", flags.dict, "preset dictionary (.gdpd or .gdpb)");
    flags.attach(compress, true);

    auto* decompress = app.add_subcommand("decompress", "restore records from a .gdcb container");
    decompress->add_option("input", input, "input .gdcb")->required();
    decompress->add_option("-o,--output", output, "output .gdr, or .mf4 for an MDF4 fixture")->required();
    decompress->add_option("--dict", flags.dict, "decompressor-side dictionary (.gdpb)");

    auto* train = app.add_subcommand("train", "build a preset dictionary from sample logs");
    train->add_option("inputs", inputs, "training .mf4/.gdr files")->required();
    train->add_option("--dict-out", dict_out, "output prefix for .gdpd/.gdpb")->required();
    flags.attach(train, false);

    auto* bench = app.add_subcommand("bench", "gain table over a budget grid");
    bench->add_option("inputs", inputs, "input .mf4/.gdr files")->required();
    bench->add_option("--modes", modes, "comma list of ram,flash,hybrid")->capture_default_str();
    bench->add_option("--ram-grid", ram_grid, "comma list of RAM budgets")->capture_default_str();
    bench->add_option("--flash-grid", flash_grid, "comma list of flash budgets")->capture_default_str();
    bench->add_option("--train", train_set, "dictionary training files (default: the inputs)");
    bench->add_option("--external", external, "external compressor command reading stdin, e.g. 'gzip -9'");
    flags.attach(bench, true);

    auto* report = app.add_subcommand("report", "summarize a .gdcb container");
    report->add_option("input", input, "input .gdcb")->required();
    report->add_option("--report", flags.report, "text or kv")->capture_default_str();

    auto* synth = app.add_subcommand("synth", "write a synthetic CAN log (.gdr or .mf4)");
    synth->add_option("-o,--output", output, "output path")->required();
    synth->add_option("--records", synth_records, "record count")->capture_default_str();
    synth->add_option("--seed", synth_seed, "generator seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*compress) {
            cmd_compress(input, output, flags.to_config(), out);
        } else if (*decompress) {
            std::optional<fs::path> dict;
            if (!flags.dict.empty())
                dict = flags.dict;
            cmd_decompress(input, output, dict, out);
        } else if (*train) {
            const auto config = flags.to_config();
            cmd_train({inputs.begin(), inputs.end()}, dict_out, config, out);
        } else if (*bench) {
            BenchGrid grid;
            grid.modes.clear();
            std::stringstream ss(modes);
            for (std::string item; std::getline(ss, item, ',');)
                if (!item.empty())
                    grid.modes.push_back(parse_mode(item));
            grid.ram_budgets = parse_size_list(ram_grid);
            grid.flash_budgets = parse_size_list(flash_grid);
            grid.training_set.assign(train_set.begin(), train_set.end());
            grid.external = external;
            cmd_bench({inputs.begin(), inputs.end()}, grid, flags.to_config(), out, err);
        } else if (*report) {
            print_report(compressed_size_report(detail::read_file(input)),
                         flags.report == "kv" ? ReportFormat::Kv : ReportFormat::Text, out);
        } else if (*synth) {
            const auto records = synthetic::can_log(synth_records, synth_seed);
            const fs::path path = output;
            if (path.extension() == ".mf4")
                detail::write_file(path, mdf4::write_fixture(records));
            else
                write_gdr(path, records);
            out << "wrote " << records.size() << " records to " << path.string() << '\n';
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace gdcan::cli
