// Command-line surface for the wavelet co-movement toolkit. Subcommands
// mirror the analysis pipeline: stats, cwt, coherence, pcoh, weem, cweem.
// All outputs are written compute-first, then temp-file + atomic rename, so
// a failing run leaves no partial files.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wavecoh/coherence.hpp"
#include "wavecoh/cwt.hpp"
#include "wavecoh/dwt.hpp"
#include "wavecoh/entropy.hpp"
#include "wavecoh/errors.hpp"
#include "wavecoh/grid_io.hpp"
#include "wavecoh/significance.hpp"
#include "wavecoh/time_series.hpp"

namespace fs = std::filesystem;
using namespace wavecoh;

namespace {

struct Options {
    std::string x, y, z;
    std::string date_col = "date";
    std::string value_col;
    std::string out = ".";
    std::vector<std::string> formats{"csv", "image"};
    std::string transform = "none";

    double s0 = -1.0;  // -1: grid default (2·dt)
    double dj = kDefaultDj;
    double omega0 = kDefaultOmega0;

    double alpha = 0.05;
    std::size_t runs = 0;  // 0: skip the significance test
    std::uint64_t seed = 0;
    bool squared = false;
    std::string pcoh_form = "standard";

    std::string levels;  // "A:B" or single "J"; empty: deepest usable level
    std::string filter = "la8";
    std::string base;  // "e" or "2"; empty: per-command default
    std::string wn = "analytic";
    std::size_t mc_runs = 100;

    std::string config_file;
};

bool wants(const Options& o, const std::string& fmt) {
    return std::find(o.formats.begin(), o.formats.end(), fmt) != o.formats.end();
}

TimeSeries load_input(const std::string& path, const Options& o) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    CsvOptions copts;
    copts.date_column = o.date_col;
    copts.value_column = o.value_col;
    return load_csv(in, copts);
}

void apply_transform(TimeSeries& ts, const std::string& kind) {
    if (kind == "none") return;
    if (kind == "log") {
        for (double& v : ts.values) {
            if (!(v > 0.0)) {
                throw InvalidParameterError("log transform requires strictly positive values");
            }
            v = std::log(v);
        }
        return;
    }
    // first difference
    if (ts.size() < 9) throw SeriesTooShortError("differencing leaves fewer than 8 points");
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) ts.values[i] = ts.values[i + 1] - ts.values[i];
    ts.values.pop_back();
    ts.timestamps.erase(ts.timestamps.begin());
    validate_series(ts);
}

template <typename Fn>
void write_atomic(const fs::path& path, Fn&& fn) {
    const fs::path tmp = path.string() + ".tmp";
    try {
        {
            std::ofstream os(tmp, std::ios::binary);
            if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
            fn(os);
            os.flush();
            if (!os) throw IoError("write failed: " + tmp.string());
        }
        fs::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
    std::cout << "wrote " << path.string() << "\n";
}

fs::path out_path(const Options& o, const char* name) {
    fs::create_directories(o.out);
    return fs::path(o.out) / name;
}

void write_row(std::ostream& os, const char* fmt, auto... args) {
    char buf[256];
    const int len = std::snprintf(buf, sizeof buf, fmt, args...);
    os.write(buf, len);
}

WaveletFilter filter_of(const Options& o) { return make_filter(o.filter); }

ExpBase base_of(const Options& o, ExpBase fallback) {
    if (o.base.empty()) return fallback;
    return o.base == "2" ? ExpBase::two : ExpBase::natural;
}

WnReference wn_of(const Options& o) {
    if (o.wn == "mc") return WnReference::montecarlo(o.mc_runs, o.seed);
    return WnReference::analytic();
}

std::pair<std::size_t, std::size_t> parse_levels(const Options& o, std::size_t n,
                                                 std::size_t filter_len) {
    if (o.levels.empty()) {
        const std::size_t deepest = max_level(n, filter_len);
        return {deepest, deepest};
    }
    std::size_t lo = 0, hi = 0;
    const auto colon = o.levels.find(':');
    try {
        if (colon == std::string::npos) {
            lo = hi = std::stoul(o.levels);
        } else {
            lo = std::stoul(o.levels.substr(0, colon));
            hi = std::stoul(o.levels.substr(colon + 1));
        }
    } catch (const std::exception&) {
        throw InvalidParameterError("--levels expects J or A:B with integer levels");
    }
    if (lo == 0 || hi < lo) throw InvalidParameterError("--levels range must satisfy 1 <= A <= B");
    return {lo, hi};
}

// Common prelude for the pair/triple commands: load, align on shared
// timestamps, then transform on the common grid.
std::pair<TimeSeries, TimeSeries> load_pair(const Options& o) {
    TimeSeries x = load_input(o.x, o);
    TimeSeries y = load_input(o.y, o);
    auto [ax, ay] = align(x, y);
    apply_transform(ax, o.transform);
    apply_transform(ay, o.transform);
    return {std::move(ax), std::move(ay)};
}

std::array<TimeSeries, 3> load_triple(const Options& o) {
    TimeSeries x = load_input(o.x, o);
    TimeSeries y = load_input(o.y, o);
    TimeSeries z = load_input(o.z, o);
    auto [ax, ay] = align(x, y);
    auto [ax2, az] = align(ax, z);
    auto [ay2, az2] = align(ay, az);
    apply_transform(ax2, o.transform);
    apply_transform(ay2, o.transform);
    apply_transform(az2, o.transform);
    return {std::move(ax2), std::move(ay2), std::move(az2)};
}

void write_stats_row(std::ostream& os, const std::string& label, const SummaryStats& s) {
    write_row(os, "%s,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%u\n", label.c_str(),
              s.n, s.mean, s.std_dev, s.min, s.max, s.skewness, s.excess_kurtosis, s.jarque_bera,
              s.ljung_box, s.degenerate ? 1u : 0u);
}

void run_stats(const Options& o) {
    struct Entry {
        std::string label;
        SummaryStats stats;
    };
    std::vector<Entry> entries;
    for (const auto& [label, path] :
         {std::pair{"x", o.x}, std::pair{"y", o.y}, std::pair{"z", o.z}}) {
        if (path.empty()) continue;
        TimeSeries ts = load_input(path, o);
        apply_transform(ts, o.transform);
        entries.push_back({std::string(label) + ":" + path, describe(ts)});
    }
    write_atomic(out_path(o, "stats.csv"), [&](std::ostream& os) {
        os << "series,n,mean,std_dev,min,max,skewness,excess_kurtosis,jarque_bera,ljung_box,"
              "degenerate\n";
        for (const auto& e : entries) write_stats_row(os, e.label, e.stats);
    });
}

Field<double> normalized_for_display(const Field<double>& f) {
    double peak = 0.0;
    for (double v : f.data()) {
        if (std::isfinite(v) && v > peak) peak = v;
    }
    Field<double> out(f.rows(), f.cols());
    for (std::size_t i = 0; i < f.size(); ++i) {
        out.data()[i] = peak > 0.0 ? f.data()[i] / peak : 0.0;
    }
    return out;
}

void run_cwt(const Options& o) {
    TimeSeries x = load_input(o.x, o);
    apply_transform(x, o.transform);
    const ScaleGrid grid = build_grid(x.size(), x.dt, o.s0, o.dj, o.omega0);
    const CwtField w = cwt(x, grid);
    const Field<double> pw = power(w);

    if (wants(o, "csv")) {
        write_atomic(out_path(o, "power.csv"),
                     [&](std::ostream& os) { export_grid(os, pw, grid, w.coi); });
    }
    if (wants(o, "image")) {
        const Image img = render_heatmap(normalized_for_display(pw), grid, w.coi);
        write_atomic(out_path(o, "power.png"), [&](std::ostream& os) { write_png(os, img); });
    }
}

void write_arrows(std::ostream& os, const CoherenceResult& r) {
    const std::size_t rows = r.phase.rows();
    const std::size_t cols = r.phase.cols();
    const std::size_t stride_s = std::max<std::size_t>(1, rows / 16);
    const std::size_t stride_t = std::max<std::size_t>(1, cols / 32);
    os << "time_index,scale,phase,class\n";
    for (std::size_t j = 0; j < rows; j += stride_s) {
        for (std::size_t i = 0; i < cols; i += stride_t) {
            const double theta = r.phase(j, i);
            if (std::isnan(theta)) continue;
            write_row(os, "%zu,%.9g,%.17g,%s\n", i, r.grid.scales[j], theta,
                      std::string(phase_class_name(classify_phase(theta))).c_str());
        }
    }
}

Field<double> maybe_squared(const Field<double>& f, bool squared) {
    if (!squared) return f;
    Field<double> out(f.rows(), f.cols());
    for (std::size_t i = 0; i < f.size(); ++i) out.data()[i] = f.data()[i] * f.data()[i];
    return out;
}

void run_coherence(const Options& o) {
    auto [x, y] = load_pair(o);
    const ScaleGrid grid = build_grid(x.size(), x.dt, o.s0, o.dj, o.omega0);
    CoherenceResult r = coherence(x, y, grid);
    if (o.runs > 0) {
        SignificanceOptions sopt;
        sopt.alpha = o.alpha;
        sopt.runs = o.runs;
        sopt.seed = o.seed;
        r.significance_mask = coherence_significance(r, x.values, y.values, sopt).mask;
    }
    const Field<double> value = maybe_squared(r.magnitude, o.squared);
    const Field<std::uint8_t>* mask =
        r.significance_mask ? &*r.significance_mask : nullptr;

    if (wants(o, "csv")) {
        write_atomic(out_path(o, "coherence.csv"),
                     [&](std::ostream& os) { export_grid(os, value, grid, r.coi, mask); });
        write_atomic(out_path(o, "phase.csv"),
                     [&](std::ostream& os) { export_grid(os, r.phase, grid, r.coi); });
        write_atomic(out_path(o, "arrows.csv"), [&](std::ostream& os) { write_arrows(os, r); });
    }
    if (wants(o, "image")) {
        const Image img = render_heatmap(value, grid, r.coi, mask);
        write_atomic(out_path(o, "coherence.png"), [&](std::ostream& os) { write_png(os, img); });
    }
}

void run_pcoh(const Options& o) {
    auto [x, y, z] = load_triple(o);
    const ScaleGrid grid = build_grid(x.size(), x.dt, o.s0, o.dj, o.omega0);
    const PartialForm form =
        o.pcoh_form == "printed" ? PartialForm::printed : PartialForm::standard;
    CoherenceResult r = partial_coherence(x, y, z, grid, form);
    if (o.runs > 0) {
        SignificanceOptions sopt;
        sopt.alpha = o.alpha;
        sopt.runs = o.runs;
        sopt.seed = o.seed;
        r.significance_mask =
            partial_coherence_significance(r, x.values, y.values, z.values, form, sopt).mask;
    }
    const Field<double> value = maybe_squared(r.magnitude, o.squared);
    const Field<std::uint8_t>* mask =
        r.significance_mask ? &*r.significance_mask : nullptr;

    if (wants(o, "csv")) {
        write_atomic(out_path(o, "pcoh.csv"),
                     [&](std::ostream& os) { export_grid(os, value, grid, r.coi, mask); });
        write_atomic(out_path(o, "pcoh_phase.csv"),
                     [&](std::ostream& os) { export_grid(os, r.phase, grid, r.coi); });
    }
    if (wants(o, "image")) {
        const Image img = render_heatmap(value, grid, r.coi, mask);
        write_atomic(out_path(o, "pcoh.png"), [&](std::ostream& os) { write_png(os, img); });
    }
}

void run_weem(const Options& o) {
    TimeSeries x = load_input(o.x, o);
    apply_transform(x, o.transform);
    const WaveletFilter f = filter_of(o);
    const auto [lo, hi] = parse_levels(o, x.size(), f.length());
    const ExpBase base = base_of(o, ExpBase::natural);
    const WnReference wn = wn_of(o);

    std::vector<std::pair<std::size_t, EntropyReport>> rows;
    for (std::size_t J = lo; J <= hi; ++J) rows.emplace_back(J, weem(x.values, J, f, base, wn));

    write_atomic(out_path(o, "weem.csv"), [&](std::ostream& os) {
        os << "J,WE,WE_wn,WEEM\n";
        for (const auto& [J, rep] : rows) {
            write_row(os, "%zu,%.17g,%.17g,%.17g\n", J, rep.we, rep.we_wn, rep.measure);
        }
    });
}

void run_cweem(const Options& o) {
    auto [x, y] = load_pair(o);
    const WaveletFilter f = filter_of(o);
    const auto [lo, hi] = parse_levels(o, x.size(), f.length());
    const ExpBase base = base_of(o, ExpBase::two);
    const WnReference wn = wn_of(o);

    struct Row {
        std::size_t J;
        const char* direction;
        EntropyReport rep;
    };
    std::vector<Row> rows;
    for (std::size_t J = lo; J <= hi; ++J) {
        rows.push_back({J, "x->y", cweem(x.values, y.values, J, f, base, wn)});
        rows.push_back({J, "y->x", cweem(y.values, x.values, J, f, base, wn)});
    }

    write_atomic(out_path(o, "cweem.csv"), [&](std::ostream& os) {
        os << "J,direction,KL,WE_wn,CWEEM\n";
        for (const auto& row : rows) {
            write_row(os, "%zu,%s,%.17g,%.17g,%.17g\n", row.J, row.direction, row.rep.we,
                      row.rep.we_wn, row.rep.measure);
        }
    });
}

void add_io_flags(CLI::App* sub, Options& o, bool with_y, bool with_z) {
    sub->add_option("--x", o.x, "CSV file for series x")->required();
    if (with_y) sub->add_option("--y", o.y, "CSV file for series y")->required();
    if (with_z) sub->add_option("--z", o.z, "CSV file for the control series z")->required();
    sub->add_option("--date-col", o.date_col, "date column name (default: date)");
    sub->add_option("--value-col", o.value_col, "value column name (default: first non-date)");
    sub->add_option("--out", o.out, "output directory (default: .)");
    sub->add_option("--transform", o.transform, "input transform (default: none)")
        ->check(CLI::IsMember({"none", "log", "diff"}));
    sub->add_option("--config", o.config_file, "flat key=value file; command-line flags override");
}

std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// CLI11 honors set_config only on the top-level app, while --config here
// belongs to each subcommand. Expand the file into --key=value tokens before
// parsing instead; keys spelled out on the command line keep precedence.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
    std::size_t sub_idx = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!args[i].empty() && args[i][0] != '-') {
            sub_idx = i;
            break;
        }
    }
    if (sub_idx == args.size()) return args;
    const CLI::App* sub = app.get_subcommand_no_throw(args[sub_idx]);
    if (sub == nullptr) return args;

    std::string path;
    for (std::size_t i = sub_idx + 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw CLI::FileError::Missing(path);

    const auto given = [&](const std::string& flag) {
        for (std::size_t i = sub_idx + 1; i < args.size(); ++i) {
            if (args[i] == flag || args[i].rfind(flag + "=", 0) == 0) return true;
        }
        return false;
    };

    std::vector<std::string> extra;
    std::string line;
    while (std::getline(in, line)) {
        line = trimmed(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw CLI::ValidationError("--config", "expected key=value, got '" + line + "'");
        }
        const std::string key = trimmed(line.substr(0, eq));
        std::string value = trimmed(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        const std::string flag = "--" + key;
        if (key.empty() || key == "config" || sub->get_option_no_throw(flag) == nullptr) {
            throw CLI::ValidationError("--config", "unknown key '" + key + "'");
        }
        if (!given(flag)) extra.push_back(flag + "=" + value);
    }
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub_idx) + 1, extra.begin(),
                extra.end());
    return args;
}

void add_grid_flags(CLI::App* sub, Options& o) {
    sub->add_option("--s0", o.s0, "smallest scale (default: 2*dt)");
    sub->add_option("--dj", o.dj, "scale resolution in octaves (default: 1/12)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--omega0", o.omega0, "wavelet center frequency (default: 6, minimum 5)");
    sub->add_option("--format", o.formats, "output formats (default: csv image)")
        ->check(CLI::IsMember({"csv", "image"}));
}

void add_significance_flags(CLI::App* sub, Options& o) {
    sub->add_option("--alpha", o.alpha, "significance level (default: 0.05)")
        ->check([](const std::string& s) -> std::string {
            const double v = std::atof(s.c_str());
            return (v > 0.0 && v < 1.0) ? "" : "must lie strictly between 0 and 1";
        });
    sub->add_option("--runs", o.runs, "surrogate runs, minimum 100 (default: 0 = no test)")
        ->check([](const std::string& s) -> std::string {
            const long v = std::atol(s.c_str());
            return (v == 0 || v >= 100) ? "" : "must be 0 or at least 100";
        });
    sub->add_option("--seed", o.seed, "surrogate seed (default: 0)");
    sub->add_flag("--squared", o.squared, "export squared magnitude");
}

void add_entropy_flags(CLI::App* sub, Options& o) {
    sub->add_option("--levels", o.levels, "level range A:B or single J (default: deepest)");
    sub->add_option("--filter", o.filter, "wavelet filter (default: la8)")
        ->check(CLI::IsMember({"haar", "d4", "la8"}));
    sub->add_option("--base", o.base, "exponent base")->check(CLI::IsMember({"e", "2"}));
    sub->add_option("--wn", o.wn, "white-noise reference (default: analytic)")
        ->check(CLI::IsMember({"analytic", "mc"}));
    sub->add_option("--mc-runs", o.mc_runs, "white-noise runs for --wn mc (default: 100)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "seed for --wn mc (default: 0)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wavelet co-movement and predictability toolkit"};
    app.require_subcommand(1);
    Options o;

    auto* stats = app.add_subcommand("stats", "Descriptive statistics of input series");
    add_io_flags(stats, o, false, false);
    stats->add_option("--y", o.y, "optional second series");
    stats->add_option("--z", o.z, "optional third series");
    stats->callback([&] { run_stats(o); });

    auto* cwtc = app.add_subcommand("cwt", "Wavelet power of one series");
    add_io_flags(cwtc, o, false, false);
    add_grid_flags(cwtc, o);
    cwtc->callback([&] { run_cwt(o); });

    auto* coh = app.add_subcommand("coherence", "Wavelet coherence of two series");
    add_io_flags(coh, o, true, false);
    add_grid_flags(coh, o);
    add_significance_flags(coh, o);
    coh->callback([&] { run_coherence(o); });

    auto* pcoh = app.add_subcommand("pcoh", "Partial coherence controlling for a third series");
    add_io_flags(pcoh, o, true, true);
    add_grid_flags(pcoh, o);
    add_significance_flags(pcoh, o);
    pcoh->add_option("--pcoh-form", o.pcoh_form, "formula variant (default: standard)")
        ->check(CLI::IsMember({"standard", "printed"}));
    pcoh->callback([&] { run_pcoh(o); });

    auto* wm = app.add_subcommand("weem", "Wavelet energy entropy measure per level");
    add_io_flags(wm, o, false, false);
    add_entropy_flags(wm, o);
    wm->callback([&] { run_weem(o); });

    auto* cwm = app.add_subcommand("cweem", "Cross wavelet energy entropy measure per level");
    add_io_flags(cwm, o, true, false);
    add_entropy_flags(cwm, o);
    cwm->callback([&] { run_cweem(o); });

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(app, std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
