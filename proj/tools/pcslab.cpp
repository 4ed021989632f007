// pcslab: batch driver for the parallel compressed sensing experiments.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pcs/experiments.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

constexpr const char* kColumns = R"(Output files (written to --out, default: the config's "output" field):

  phase          phase.csv          C,scenario,m,m_over_N,s,s_over_m,successes,trials,probability
                 (m is per sensor when grid.m_axis = "per_sensor"; total rows are C*m)
                 phase_plot.csv     x,y,series   (x = m/N, y = s/m at the 50% crossing,
                                                  series = "<scenario> C=<C>")
  bounds         bounds.csv         C,D,quantity,value
                                    quantity in {Upsilon_idt, Upsilon_dist, Xi_dist, norm1_max}
                 bounds_plot.csv    x,y,series   (x = C, y = value, series = quantity)
  concentration  concentration.csv  t,m,empirical_tail,bound,zeta
                 concentration_plot.csv
                                    x,y,series   (x = t, series = "empirical m=<m>" | "bound m=<m>")
  solve          solve.csv          i,x_hat_re,x_hat_im,x_re,x_im   (x columns empty without a truth)
                 solve_plot.csv     x,y,series   (x = i, y = |value|, series = x_hat | x)
  profile-check  profile_check.csv  C,scenario,isometry_residual,norm1_max,Xi_dist,Upsilon_dist,Upsilon_idt
                 profile_check_plot.csv
                                    x,y,series   (x = C, series = "<quantity> <scenario>")

Every subcommand also writes <name>.json with the configuration, its hash,
the seed and the success criterion. The config schema is docs/config_schema.json.

Exit codes: 0 ok, 2 configuration error, 3 numerical failure.)";

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
    std::optional<long> trials;
};

pcs::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pcs::ConfigError("cannot open '" + path + "'");
    try {
        return pcs::json::parse(in);
    } catch (const pcs::json::parse_error& e) {
        throw pcs::ConfigError(path + ": " + e.what());
    }
}

pcs::json load_document(const Options& opt, std::string_view experiment) {
    pcs::json doc = read_json(opt.config_path);
    if (!doc.is_object()) throw pcs::ConfigError("configuration must be a JSON object");
    doc["experiment"] = experiment;
    if (opt.seed) doc["seed"] = *opt.seed;
    if (opt.threads) doc["threads"] = *opt.threads;
    if (opt.trials) doc["trials"] = *opt.trials;
    if (opt.out) doc["output"] = *opt.out;
    return doc;
}

fs::path output_dir(const pcs::json& doc) {
    fs::path dir = doc.value("output", std::string("out"));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw pcs::ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw pcs::ConfigError("cannot write '" + path.string() + "'");
    return out;
}

void write_meta(const fs::path& path, pcs::json meta) {
    open_out(path) << meta.dump(2) << '\n';
}

int cmd_phase(const Options& opt) {
    const auto doc = load_document(opt, "phase");
    const auto config = pcs::config_from_json(doc);
    const auto dir = output_dir(doc);
    const auto m_values = pcs::phase_m_values(config);
    if (m_values.back() > config.n)
        std::cerr << "pcslab: note: grid includes m > N (" << m_values.back() << " > " << config.n << ")\n";
    const auto grids = pcs::run_phase_experiment(config);
    {
        auto os = open_out(dir / "phase.csv");
        pcs::write_phase_csv(os, grids);
    }
    {
        auto os = open_out(dir / "phase_plot.csv");
        pcs::write_curves_csv(os, grids);
    }
    auto meta = pcs::metadata_json(config);
    pcs::json curves = pcs::json::array();
    for (const auto& g : grids) {
        pcs::json points = pcs::json::array();
        for (const auto& p : pcs::extract_half_curve(g))
            points.push_back({{"m_over_N", p.m_over_n}, {"s_over_m", p.s_over_m}, {"open_ended", p.open_ended}});
        curves.push_back({{"C", g.sensors}, {"scenario", pcs::to_string(g.scenario)}, {"points", points}});
    }
    meta["curves"] = std::move(curves);
    write_meta(dir / "phase.json", std::move(meta));
    return kOk;
}

int cmd_bounds(const Options& opt) {
    const auto doc = load_document(opt, "bounds_sweep");
    const auto config = pcs::config_from_json(doc);
    const auto dir = output_dir(doc);
    const auto rows = pcs::run_bounds_sweep(config);
    {
        auto os = open_out(dir / "bounds.csv");
        pcs::write_sweep_csv(os, rows);
    }
    {
        auto os = open_out(dir / "bounds_plot.csv");
        pcs::write_sweep_plot_csv(os, rows);
    }
    write_meta(dir / "bounds.json", pcs::metadata_json(config));
    return kOk;
}

int cmd_concentration(const Options& opt) {
    const auto doc = load_document(opt, "concentration");
    const auto config = pcs::config_from_json(doc);
    const auto dir = output_dir(doc);
    const auto rows = pcs::run_concentration(config);
    {
        auto os = open_out(dir / "concentration.csv");
        pcs::write_concentration_csv(os, rows);
    }
    {
        auto os = open_out(dir / "concentration_plot.csv");
        pcs::write_concentration_plot_csv(os, rows);
    }
    write_meta(dir / "concentration.json", pcs::metadata_json(config));
    return kOk;
}

int cmd_solve(const Options& opt) {
    const auto doc = load_document(opt, "solve");
    const auto dir = output_dir(doc);
    const auto result = pcs::run_solve(doc);
    const auto x_hat = pcs::vector_from_json(result.at("result").at("x_hat"));
    std::optional<pcs::CVector> truth;
    if (result.contains("truth")) truth = pcs::vector_from_json(result.at("truth"));
    {
        auto os = open_out(dir / "solve.csv");
        os << std::setprecision(12) << "i,x_hat_re,x_hat_im,x_re,x_im\n";
        for (pcs::Index i = 0; i < x_hat.size(); ++i) {
            os << i << ',' << x_hat(i).real() << ',' << x_hat(i).imag() << ',';
            if (truth) os << (*truth)(i).real() << ',' << (*truth)(i).imag();
            else os << ',';
            os << '\n';
        }
    }
    {
        auto os = open_out(dir / "solve_plot.csv");
        os << std::setprecision(12) << "x,y,series\n";
        for (pcs::Index i = 0; i < x_hat.size(); ++i) {
            os << i << ',' << std::abs(x_hat(i)) << ",x_hat\n";
            if (truth) os << i << ',' << std::abs((*truth)(i)) << ",x\n";
        }
    }
    pcs::json meta = result;
    meta["config"] = doc;
    write_meta(dir / "solve.json", std::move(meta));

    const auto& r = result.at("result");
    if (r.at("infeasible").get<bool>()) {
        std::cerr << "pcslab: the constraint set is empty\n";
        return kNumericalError;
    }
    if (!r.at("converged").get<bool>()) {
        std::cerr << "pcslab: solver did not converge within its iteration budget\n";
        return kNumericalError;
    }
    return kOk;
}

int cmd_profile_check(const Options& opt) {
    const auto doc = load_document(opt, "profile-check");
    const auto config = pcs::config_from_json(doc);
    const auto dir = output_dir(doc);
    const auto report = pcs::run_profile_check(config);
    auto opt_value = [](const pcs::json& j) { return j.is_null() ? std::string() : j.dump(); };
    {
        auto os = open_out(dir / "profile_check.csv");
        os << std::setprecision(12) << "C,scenario,isometry_residual,norm1_max,Xi_dist,Upsilon_dist,Upsilon_idt\n";
        for (const auto& e : report.at("entries")) {
            const auto& r = e.at("report");
            os << e.at("C").get<long>() << ',' << e.at("scenario").get<std::string>() << ','
               << e.at("joint_isometry_residual").get<double>() << ',' << r.at("norm1_max").get<double>() << ','
               << r.at("Xi_dist").get<double>() << ',' << opt_value(r.at("Upsilon_dist")) << ','
               << opt_value(r.at("Upsilon_idt")) << '\n';
        }
    }
    {
        auto os = open_out(dir / "profile_check_plot.csv");
        os << std::setprecision(12) << "x,y,series\n";
        for (const auto& e : report.at("entries")) {
            const auto scenario = e.at("scenario").get<std::string>();
            const auto& r = e.at("report");
            for (const char* q : {"norm1_max", "Xi_dist", "Upsilon_dist", "Upsilon_idt"})
                if (!r.at(q).is_null())
                    os << e.at("C").get<long>() << ',' << r.at(q).get<double>() << ",\"" << q << ' ' << scenario
                       << "\"\n";
        }
    }
    auto meta = pcs::metadata_json(config);
    meta["result"] = report;
    write_meta(dir / "profile_check.json", std::move(meta));

    bool ok = true;
    for (const auto& e : report.at("entries"))
        if (!(e.at("joint_isometry_residual").get<double>() <= 1e-10)) ok = false;
    if (!ok) {
        std::cerr << "pcslab: joint isometry residual above 1e-10\n";
        return kNumericalError;
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parallel compressed sensing experiments"};
    app.footer(kColumns);
    app.require_subcommand(1);

    Options opt;
    std::uint64_t seed = 0;
    std::string out;
    unsigned threads = 0;
    long trials = 0;

    struct Entry {
        const char* name;
        const char* help;
        int (*run)(const Options&);
    };
    const Entry entries[] = {
        {"profile-check", "Joint isometry residuals, norms and bound quantities of the configured profiles",
         cmd_profile_check},
        {"bounds", "Upsilon / Xi sweep over the configured C list", cmd_bounds},
        {"phase", "Phase-transition grids and 50% curves", cmd_phase},
        {"concentration", "Monte-Carlo tail of ||Ax||^2 against the concentration bound", cmd_concentration},
        {"solve", "Single basis-pursuit solve", cmd_solve},
    };
    std::vector<std::pair<CLI::App*, int (*)(const Options&)>> subs;
    for (const auto& e : entries) {
        auto* sub = app.add_subcommand(e.name, e.help);
        sub->add_option("config", opt.config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Master seed (overrides the config)");
        sub->add_option("--out", out, "Output directory (overrides the config)");
        sub->add_option("--threads", threads, "Worker threads, 0 = hardware concurrency");
        sub->add_option("--trials", trials, "Trials per cell / Monte-Carlo trials")->check(CLI::PositiveNumber);
        subs.emplace_back(sub, e.run);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    for (auto& [sub, run] : subs) {
        if (!sub->parsed()) continue;
        if (sub->count("--seed")) opt.seed = seed;
        if (sub->count("--out")) opt.out = out;
        if (sub->count("--threads")) opt.threads = threads;
        if (sub->count("--trials")) opt.trials = trials;
        try {
            return run(opt);
        } catch (const pcs::ConfigError& e) {
            std::cerr << "pcslab: configuration error: " << e.what() << '\n';
            return kConfigError;
        } catch (const pcs::NumericalError& e) {
            std::cerr << "pcslab: numerical failure: " << e.what() << '\n';
            return kNumericalError;
        } catch (const pcs::json::exception& e) {
            std::cerr << "pcslab: configuration error: " << e.what() << '\n';
            return kConfigError;
        } catch (const pcs::Error& e) {
            std::cerr << "pcslab: " << e.what() << '\n';
            return kNumericalError;
        }
    }
    return kConfigError;
}
