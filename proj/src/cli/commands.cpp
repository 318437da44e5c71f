#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/csv.hpp"
#include "twinbeam/analytic.hpp"
#include "twinbeam/chain.hpp"
#include "twinbeam/diagnostic.hpp"

namespace twinbeam::cli {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::ofstream open_output(const std::string& path)
{
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot open output file '" + path + "'");
    return f;
}

void finish_output(std::ofstream& f, const std::string& path)
{
    f.flush();
    if (!f)
        throw IoError("failed while writing '" + path + "'");
}

std::vector<double> linspace(double lo, double hi, int count)
{
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        v[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return v;
}

std::string optima_path(const std::string& out)
{
    const auto dot = out.find_last_of('.');
    const auto slash = out.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return out + "_optima";
    return out.substr(0, dot) + "_optima" + out.substr(dot);
}

// ---------------------------------------------------------------- nf ----

struct NfArgs {
    std::optional<double> squeeze;
    std::optional<double> gain;
    double ta = 1.0;
    double tb = 1.0;
    double eta = 0.85;
    std::optional<double> eta_a;
    std::optional<double> eta_b;
    bool json = false;
};

MediumParams medium_from(const std::optional<double>& squeeze,
                         const std::optional<double>& gain, double ta, double tb)
{
    if (gain)
        return MediumParams::from_gain(*gain, ta, tb);
    MediumParams m{*squeeze, ta, tb};
    m.validate();
    return m;
}

nlohmann::json noise_to_json(const NoiseResult& r)
{
    return {
        {"nf_linear", r.nf_linear},
        {"nf_db", r.nf_db},
        {"variance_rel", r.variance_rel},
        {"snl_rel", r.snl_rel},
        {"gain_probe", r.gain_probe},
        {"gain_conjugate", r.gain_conjugate},
        {"breakdown",
         {{"snl", r.breakdown.snl_term},
          {"mixing", r.breakdown.mixing_term},
          {"vacuum", r.breakdown.vacuum_term}}},
    };
}

int cmd_nf(const NfArgs& a, std::ostream& out)
{
    const MediumParams m = medium_from(a.squeeze, a.gain, a.ta, a.tb);
    const DetectionParams det{a.eta_a.value_or(a.eta), a.eta_b.value_or(a.eta)};
    const NoiseResult general = nf_general(m, det);

    // Matching closed form, when one exists for these parameters.
    std::optional<std::pair<std::string, NoiseResult>> closed;
    if (det.eta_a == det.eta_b) {
        if (m.tb == 1.0)
            closed = {"forward", nf_forward_closed(m.squeeze, m.ta, det.eta_a)};
        else if (m.ta == 1.0)
            closed = {"reverse", nf_reverse_closed(m.squeeze, m.tb, det.eta_a)};
    }

    if (a.json) {
        nlohmann::json j{
            {"medium",
             {{"squeeze", m.squeeze},
              {"gain", m.intrinsic_gain()},
              {"ta", m.ta},
              {"tb", m.tb}}},
            {"detection", {{"eta_a", det.eta_a}, {"eta_b", det.eta_b}}},
            {"noise", noise_to_json(general)},
        };
        if (closed) {
            j["closed_form"] = noise_to_json(closed->second);
            j["closed_form"]["kind"] = closed->first;
            j["closed_form"]["difference"] =
                std::abs(closed->second.nf_linear - general.nf_linear);
        }
        out << j.dump(2) << "\n";
        return kExitOk;
    }

    out << "medium      S = " << format_number(m.squeeze)
        << "  (G = " << format_number(m.intrinsic_gain()) << ")"
        << "  Ta = " << format_number(m.ta) << "  Tb = " << format_number(m.tb) << "\n";
    out << "detection   eta_a = " << format_number(det.eta_a)
        << "  eta_b = " << format_number(det.eta_b) << "\n";
    out << "nf          " << format_number(general.nf_linear) << "  ("
        << format_number(general.nf_db) << " dB)\n";
    out << "variance    " << format_number(general.variance_rel)
        << "  snl " << format_number(general.snl_rel) << "  (units of N0)\n";
    out << "gains       G_a = " << format_number(general.gain_probe)
        << "  G_b = " << format_number(general.gain_conjugate) << "\n";
    out << "breakdown   snl " << format_number(general.breakdown.snl_term)
        << "  mixing " << format_number(general.breakdown.mixing_term)
        << "  vacuum " << format_number(general.breakdown.vacuum_term) << "\n";
    if (closed)
        out << closed->first << " closed form  "
            << format_number(closed->second.nf_linear) << "  |difference| "
            << format_number(std::abs(closed->second.nf_linear - general.nf_linear), 3)
            << "\n";
    return kExitOk;
}

// ------------------------------------------------------------- sweep ----

struct SweepArgs {
    double ta_min = 0.01;
    double ta_max = 1.0;
    int ta_count = 100;
    double gain_min = 1.0;
    double gain_max = 5.0;
    int gain_count = 9;
    double eta = 0.85;
    std::string out_path;
    std::string optima_out;
};

int cmd_sweep(const SweepArgs& a, std::ostream&)
{
    if (a.ta_count < 2 || a.gain_count < 2)
        throw DomainError("sweep counts must be >= 2");
    if (!(a.ta_min > 0.0 && a.ta_max <= 1.0 && a.ta_min <= a.ta_max))
        throw DomainError("ta range must lie in (0, 1]");
    if (!(a.gain_min >= 1.0 && a.gain_min <= a.gain_max))
        throw DomainError("gain range must lie in [1, inf)");

    const auto tas = linspace(a.ta_min, a.ta_max, a.ta_count);
    const auto gains = linspace(a.gain_min, a.gain_max, a.gain_count);

    std::ofstream grid = open_output(a.out_path);
    grid << "ta,gain,nf_db\n";
    for (const double ta : tas)
        for (const double g : gains) {
            const MediumParams m = MediumParams::from_gain(g, ta, 1.0);
            const NoiseResult r = nf_forward_closed(m.squeeze, ta, a.eta);
            grid << format_number(ta) << ',' << format_number(g) << ','
                 << format_number(r.nf_db) << "\n";
        }
    finish_output(grid, a.out_path);

    const std::string opt_path = a.optima_out.empty() ? optima_path(a.out_path) : a.optima_out;
    std::ofstream optima = open_output(opt_path);
    optima << "gain,ta_star,nf_star_db\n";
    for (const double g : gains) {
        if (g <= 1.0) {
            // no mixing: the noise figure is flat in ta
            optima << format_number(g) << ",1,0\n";
            continue;
        }
        const MediumParams m = MediumParams::from_gain(g);
        const TransmissionOptimum best = optimal_probe_transmission(m.squeeze, a.eta);
        optima << format_number(g) << ',' << format_number(best.ta) << ','
               << format_number(best.noise.nf_db) << "\n";
    }
    finish_output(optima, opt_path);
    return kExitOk;
}

// ----------------------------------------------------------- compare ----

struct CompareArgs {
    double gain = 3.0;
    double eta = 0.85;
    double t_min = 0.3;
    double t_max = 1.0;
    int t_count = 100;
    std::string out_path;
};

int cmd_compare(const CompareArgs& a, std::ostream&)
{
    if (a.t_count < 2)
        throw DomainError("compare needs at least two grid points");
    const MediumParams m = MediumParams::from_gain(a.gain);

    std::ofstream f = open_output(a.out_path);
    f << "t,nf_forward_db,nf_reverse_db\n";
    for (const double t : linspace(a.t_min, a.t_max, a.t_count)) {
        const NoiseResult fwd = nf_forward_closed(m.squeeze, t, a.eta);
        const NoiseResult rev = nf_reverse_closed(m.squeeze, t, a.eta);
        if (rev.nf_linear < fwd.nf_linear - 1e-12) {
            std::ostringstream msg;
            msg << "reverse configuration fell below forward at t = " << t
                << " (forward " << fwd.nf_linear << ", reverse " << rev.nf_linear << ")";
            throw std::logic_error(msg.str());
        }
        f << format_number(t) << ',' << format_number(fwd.nf_db) << ','
          << format_number(rev.nf_db) << "\n";
    }
    finish_output(f, a.out_path);
    return kExitOk;
}

// ------------------------------------------------------------ oracle ----

struct OracleArgs {
    std::optional<double> squeeze;
    std::optional<double> gain;
    double ta = 0.7;
    double tb = 1.0;
    double eta = 0.85;
    std::vector<std::int64_t> stages{1000, 10000, 100000};
    double threshold = 1e-4;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out, std::ostream& err)
{
    std::optional<double> squeeze = a.squeeze;
    if (!squeeze && !a.gain)
        squeeze = 1.0;
    const MediumParams m = medium_from(squeeze, a.gain, a.ta, a.tb);
    const DetectionParams det = DetectionParams::balanced(a.eta);

    const auto rows = convergence_table(m, det, a.stages);
    const double reference = nf_general(m, det).nf_linear;

    out << "continuum nf = " << format_number(reference) << " ("
        << format_number(db_from_linear(reference)) << " dB)\n";
    char line[128];
    std::snprintf(line, sizeof(line), "%10s %16s %14s %8s\n", "N", "nf", "|error|", "ratio");
    out << line;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::string ratio = "-";
        if (i > 0 && rows[i - 1].abs_error > 0.0)
            ratio = format_number(rows[i].abs_error / rows[i - 1].abs_error, 3);
        std::snprintf(line, sizeof(line), "%10lld %16s %14s %8s\n",
                      static_cast<long long>(rows[i].stages),
                      format_number(rows[i].nf, 10).c_str(),
                      format_number(rows[i].abs_error, 4).c_str(), ratio.c_str());
        out << line;
    }

    if (rows.back().abs_error > a.threshold) {
        err << "regression: final error " << format_number(rows.back().abs_error, 4)
            << " exceeds threshold " << format_number(a.threshold, 4) << "\n";
        return kExitRegression;
    }
    out << "final error within threshold " << format_number(a.threshold, 4) << "\n";
    return kExitOk;
}

// ------------------------------------------------------------ invert ----

struct InvertArgs {
    std::string in_path;
    std::string out_path;
    double eta = 0.85;
    double tb = 1.0;
    double background_db = 0.0;
};

int cmd_invert(const InvertArgs& a, std::ostream&, std::ostream& err)
{
    std::ifstream in(a.in_path);
    if (!in)
        throw IoError("cannot open input file '" + a.in_path + "'");
    const MeasurementFile file = read_measurements(in);

    std::ofstream out_csv = open_output(a.out_path);
    out_csv << "detuning_mhz,G_intrinsic,Ta,residual,nf_pred_db";
    if (file.has_noise)
        out_csv << ",nf_meas_db,excess_db";
    out_csv << "\n";

    InversionOptions opts;
    opts.tb = a.tb;
    std::size_t failed_rows = 0;
    std::size_t warnings = 0;
    for (const MeasurementRecord& rec : file.records) {
        double gain = kNan;
        double ta = kNan;
        double residual = kNan;
        double nf_pred = kNan;
        try {
            const InversionResult inv = invert_gains(rec, a.eta, opts);
            gain = inv.intrinsic_gain;
            ta = inv.ta;
            residual = inv.residual;
            nf_pred = predict_squeezing(inv, a.eta).nf_db;
        } catch (const NoSolution&) {
            ++failed_rows;
            ++warnings;
        } catch (const NotConverged&) {
            ++failed_rows;
            ++warnings;
        }
        out_csv << format_number(rec.detuning_mhz) << ',' << format_number(gain) << ','
                << format_number(ta) << ',' << format_number(residual) << ','
                << format_number(nf_pred);
        if (file.has_noise) {
            double excess = kNan;
            try {
                excess = excess_noise_db(*rec.nf_db, a.background_db);
            } catch (const DomainError&) {
                ++warnings;
            }
            out_csv << ',' << format_number(*rec.nf_db) << ',' << format_number(excess);
        }
        out_csv << "\n";
    }
    finish_output(out_csv, a.out_path);

    if (file.records.empty())
        err << "warning: input contained no data rows\n";
    err << "inverted " << (file.records.size() - failed_rows) << "/" << file.records.size()
        << " rows";
    if (warnings > 0)
        err << " (" << warnings << " warnings)";
    err << "\n";
    return kExitOk;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"twin-beam relative-intensity squeezing model"};
    app.require_subcommand(1);

    NfArgs nf_args;
    CLI::App* nf = app.add_subcommand("nf", "evaluate the noise figure at one parameter point");
    auto* nf_s = nf->add_option("--s", nf_args.squeeze, "squeezing parameter S");
    auto* nf_g = nf->add_option("--gain", nf_args.gain, "intrinsic gain G = cosh^2 S");
    nf_s->excludes(nf_g);
    nf->add_option("--ta", nf_args.ta, "probe transmission")->capture_default_str();
    nf->add_option("--tb", nf_args.tb, "conjugate transmission")->capture_default_str();
    nf->add_option("--eta", nf_args.eta, "balanced detection transmission")
        ->envname("TWINBEAM_ETA")
        ->capture_default_str();
    nf->add_option("--eta-a", nf_args.eta_a, "probe detection transmission (overrides --eta)");
    nf->add_option("--eta-b", nf_args.eta_b, "conjugate detection transmission (overrides --eta)");
    nf->add_flag("--json", nf_args.json, "emit JSON instead of text");

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "grid of nf over (ta, gain), plus per-gain optima");
    sweep->add_option("--ta-min", sweep_args.ta_min)->capture_default_str();
    sweep->add_option("--ta-max", sweep_args.ta_max)->capture_default_str();
    sweep->add_option("--ta-count", sweep_args.ta_count)->capture_default_str();
    sweep->add_option("--gain-min", sweep_args.gain_min)->capture_default_str();
    sweep->add_option("--gain-max", sweep_args.gain_max)->capture_default_str();
    sweep->add_option("--gain-count", sweep_args.gain_count)->capture_default_str();
    sweep->add_option("--eta", sweep_args.eta, "balanced detection transmission")
        ->envname("TWINBEAM_ETA")
        ->capture_default_str();
    sweep->add_option("--out", sweep_args.out_path, "grid CSV path")->required();
    sweep->add_option("--optima-out", sweep_args.optima_out,
                      "optima CSV path (default: derived from --out)");

    CompareArgs compare_args;
    CLI::App* compare =
        app.add_subcommand("compare", "forward vs reverse configuration over a transmission grid");
    compare->add_option("--gain", compare_args.gain, "intrinsic gain")->capture_default_str();
    compare->add_option("--eta", compare_args.eta, "balanced detection transmission")
        ->envname("TWINBEAM_ETA")
        ->capture_default_str();
    compare->add_option("--t-min", compare_args.t_min)->capture_default_str();
    compare->add_option("--t-max", compare_args.t_max)->capture_default_str();
    compare->add_option("--t-count", compare_args.t_count)->capture_default_str();
    compare->add_option("--out", compare_args.out_path, "CSV path")->required();

    OracleArgs oracle_args;
    CLI::App* oracle =
        app.add_subcommand("oracle", "discrete-chain convergence table against the continuum model");
    auto* or_s = oracle->add_option("--s", oracle_args.squeeze, "squeezing parameter S");
    auto* or_g = oracle->add_option("--gain", oracle_args.gain, "intrinsic gain");
    or_s->excludes(or_g);
    oracle->add_option("--ta", oracle_args.ta)->capture_default_str();
    oracle->add_option("--tb", oracle_args.tb)->capture_default_str();
    oracle->add_option("--eta", oracle_args.eta, "balanced detection transmission")
        ->envname("TWINBEAM_ETA")
        ->capture_default_str();
    oracle->add_option("--stages", oracle_args.stages, "ascending stage counts")
        ->delimiter(',')
        ->capture_default_str();
    oracle->add_option("--threshold", oracle_args.threshold, "regression threshold on the final error")
        ->capture_default_str();

    InvertArgs invert_args;
    CLI::App* invert =
        app.add_subcommand("invert", "recover (G, Ta) from a CSV of measured gains");
    invert->add_option("--in", invert_args.in_path, "measurement CSV")->required();
    invert->add_option("--out", invert_args.out_path, "output CSV")->required();
    invert->add_option("--eta", invert_args.eta, "balanced detection transmission")
        ->envname("TWINBEAM_ETA")
        ->capture_default_str();
    invert->add_option("--tb", invert_args.tb, "assumed conjugate transmission")
        ->capture_default_str();
    invert->add_option("--background-db", invert_args.background_db,
                       "pump-background noise level for the excess column")
        ->capture_default_str();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (nf->parsed()) {
            if (!nf_args.squeeze && !nf_args.gain)
                throw DomainError("nf requires one of --s or --gain");
            return cmd_nf(nf_args, out);
        }
        if (sweep->parsed())
            return cmd_sweep(sweep_args, out);
        if (compare->parsed())
            return cmd_compare(compare_args, out);
        if (oracle->parsed())
            return cmd_oracle(oracle_args, out, err);
        if (invert->parsed())
            return cmd_invert(invert_args, out, err);
        err << "error: no command selected\n";
        return kExitUsage;
    } catch (const CsvError& e) {
        err << "error: line " << e.line << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SingularSystem& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::logic_error& e) {
        err << "internal error: " << e.what() << "\n";
        return 70;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 70;
    }
}

}  // namespace twinbeam::cli
