#include "gdnlab/asymptotics.hpp"
#include "gdnlab/exact_solutions.hpp"
#include "gdnlab/experiment.hpp"
#include "gdnlab/lab_io.hpp"
#include "gdnlab/norms.hpp"
#include "gdnlab/vector_field.hpp"
#include "gdnlab/wave_packets.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;
using namespace gdnlab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Merge --set overrides into config text: a later `key = value` line would
// trip the duplicate-key check, so lines carrying an overridden key are
// dropped before the overrides are appended.
std::string merge_overrides(std::string base, const std::vector<std::string>& overrides) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const std::string& item : overrides) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + item + "'");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            if (a == std::string::npos)
                return std::string();
            const auto b = s.find_last_not_of(" \t");
            return s.substr(a, b - a + 1);
        };
        pairs.emplace_back(trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
    }

    std::ostringstream merged;
    std::istringstream in(base);
    std::string line;
    while (std::getline(in, line)) {
        std::string body = line;
        const std::size_t hash = body.find('#');
        if (hash != std::string::npos)
            body.erase(hash);
        const std::size_t eq = body.find('=');
        bool drop = false;
        if (eq != std::string::npos) {
            std::string key = body.substr(0, eq);
            key.erase(0, key.find_first_not_of(" \t"));
            key.erase(key.find_last_not_of(" \t") + 1);
            for (const auto& [k, v] : pairs)
                if (k == key)
                    drop = true;
        }
        if (!drop)
            merged << line << "\n";
    }
    for (const auto& [k, v] : pairs)
        merged << k << " = " << v << "\n";
    return std::move(merged).str();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

void print_norm_table(const Field& f, double sigma) {
    std::cout << "t       = " << format_double(f.time) << "\n"
              << "n       = " << f.grid.n << "\n"
              << "length  = " << format_double(f.grid.length) << "\n"
              << "sup     = " << format_double(lp_norm(f, kInf)) << "\n"
              << "l2      = " << format_double(lp_norm(f, 2.0)) << "\n"
              << "l1      = " << format_double(lp_norm(f, 1.0)) << "\n"
              << "h1      = " << format_double(sobolev_norm(f, 1.0, SobolevKind::inhomogeneous))
              << "\n"
              << "mass    = " << format_double(mass(f)) << "\n"
              << "energy  = " << format_double(energy(f, sigma)) << "\n";
}

struct SimulateOptions {
    double sigma = 1.0;
    double epsilon = 0.05;
    std::size_t n = 4096;
    double length = 800.0;
    double dt = 0.02;
    double t_end = 16.0;
    int per_octave = 8;
    std::string initial = "gaussian";
    std::string from_snapshot;
    std::uint64_t seed = 0;
    std::string output_dir = "out/simulate";
};

int run_simulate(const SimulateOptions& opt) {
    ExperimentConfig cfg;
    cfg.sim.sigma = opt.sigma;
    cfg.sim.grid = Grid1D(opt.n, opt.length);
    cfg.sim.dt = opt.dt;
    cfg.sim.t_end = opt.t_end;
    cfg.epsilon = opt.epsilon;
    cfg.seed = opt.seed;
    cfg.sim.snapshot_times = {0.0};
    for (int k = 0;; ++k) {
        const double t = std::pow(2.0, static_cast<double>(k) / opt.per_octave);
        if (t > opt.t_end * (1.0 + 1e-12))
            break;
        cfg.sim.snapshot_times.push_back(std::min(t, opt.t_end));
    }
    cfg.sim.validate();

    Field u0(cfg.sim.grid, 0.0);
    if (!opt.from_snapshot.empty()) {
        u0 = read_snapshot(opt.from_snapshot);
        if (!(u0.grid == cfg.sim.grid))
            throw std::invalid_argument("simulate: --from snapshot grid (" +
                                        std::to_string(u0.grid.n) +
                                        " points) does not match --n/--length");
        u0.time = 0.0;
    } else {
        if (opt.initial == "gaussian")
            cfg.initial_data = InitialData::gaussian;
        else if (opt.initial == "chirped")
            cfg.initial_data = InitialData::chirped;
        else if (opt.initial == "random")
            cfg.initial_data = InitialData::random;
        else if (opt.initial == "zero")
            cfg.initial_data = InitialData::zero;
        else
            throw std::invalid_argument("simulate: unknown initial data '" + opt.initial + "'");
        u0 = initial_state(cfg);
    }

    const Trajectory traj = run(u0, cfg.sim);

    const fs::path dir(opt.output_dir);
    fs::create_directories(dir / "snapshots");
    {
        std::ofstream out(dir / "series.csv", std::ios::binary | std::ios::trunc);
        CsvWriter csv(out, {"t", "sup_u", "sup_ux", "mass", "energy", "mass_drift",
                            "energy_drift"});
        for (std::size_t k = 0; k < traj.snapshots.fields.size(); ++k) {
            const Field& f = traj.snapshots.fields[k];
            const ConservedReport& r = traj.reports[k];
            csv.row({f.time, lp_norm(f, kInf), lp_norm(derivative(f, 1), kInf), mass(f),
                     energy(f, cfg.sim.sigma), r.relative_mass_drift,
                     r.relative_energy_drift});
        }
    }
    for (std::size_t k = 0; k < traj.snapshots.fields.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof(name), "snapshot_%04zu.gdnl", k);
        write_snapshot(traj.snapshots.fields[k], cfg.sim.sigma, dir / "snapshots" / name);
    }

    if (traj.aborted) {
        std::cerr << "simulate: aborted at t = " << format_double(traj.aborted->time) << ": "
                  << traj.aborted->reason << "\n";
        return 2;
    }
    std::cout << "simulate: " << traj.snapshots.fields.size() << " snapshots to "
              << opt.output_dir << "\n";
    print_norm_table(traj.snapshots.fields.back(), cfg.sim.sigma);
    return 0;
}

struct SolitonOptions {
    double sigma = 1.0;
    double omega = 1.0;
    double c = 0.0;
    std::size_t n = 32768;
    double length = 450.0;
    std::string gauge = "divergence";
    std::string output;
};

int run_soliton(const SolitonOptions& opt) {
    const SolitonParams p(opt.sigma, opt.omega, opt.c);
    const Grid1D grid(opt.n, opt.length);
    const SolitonGauge gauge =
        opt.gauge == "advection" ? SolitonGauge::advection : SolitonGauge::divergence;
    if (opt.gauge != "advection" && opt.gauge != "divergence")
        throw std::invalid_argument("soliton: gauge must be divergence or advection");

    const Field f = soliton_field(p, grid, gauge);
    print_norm_table(f, p.sigma);

    const Field adv = soliton_field(p, grid, SolitonGauge::advection);
    const double lhs = std::pow(lp_norm(derivative(adv, 1), 2.0), 2.0);
    const double rhs = p.omega * mass(adv);
    std::cout << "virial  = " << format_double(lhs) << " vs omega*mass = "
              << format_double(rhs) << " (rel gap " << format_double(std::fabs(lhs - rhs) / rhs)
              << ")\n";

    if (!opt.output.empty()) {
        write_snapshot(f, p.sigma, opt.output);
        std::cout << "wrote " << opt.output << "\n";
    }
    return 0;
}

struct PacketOptions {
    std::string snapshot;
    double v = 1.0;
    double t = 8.0;
    std::size_t n = 8192;
    double length = 400.0;
};

int run_packet(const PacketOptions& opt) {
    const PacketConfig pc;
    if (!opt.snapshot.empty()) {
        const SnapshotHeader header = read_snapshot_header(opt.snapshot);
        const Field f = read_snapshot(opt.snapshot);
        const cdouble gp = gamma_physical(f, opt.v, pc);
        const cdouble gf = gamma_fourier(to_spectrum(f), opt.v, pc);
        std::cout << "snapshot t = " << format_double(header.time) << ", sigma = "
                  << format_double(header.sigma) << "\n"
                  << "gamma_physical = " << format_double(gp.real()) << " + "
                  << format_double(gp.imag()) << "i\n"
                  << "gamma_fourier  = " << format_double(gf.real()) << " + "
                  << format_double(gf.imag()) << "i\n"
                  << "abs difference = " << format_double(std::abs(gp - gf)) << "\n";
        return 0;
    }
    const Grid1D grid(opt.n, opt.length);
    const Field packet = wave_packet(opt.v, opt.t, grid, pc);
    const Field residual = packet_residual(opt.v, opt.t, grid, pc);
    std::cout << "packet l1   = " << format_double(lp_norm(packet, 1.0)) << "\n"
              << "residual l1 = " << format_double(lp_norm(residual, 1.0)) << "\n"
              << "ratio       = "
              << format_double(lp_norm(residual, 1.0) / lp_norm(packet, 1.0)) << "\n";
    return 0;
}

struct FitOptions {
    std::string csv;
    std::string x_column = "t";
    std::string y_column;
    double window_lo = 8.0;
    double window_hi = 128.0;
};

int run_fit(const FitOptions& opt) {
    std::ifstream in(opt.csv, std::ios::binary);
    if (!in)
        throw std::runtime_error("fit: cannot open " + opt.csv);
    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error("fit: " + opt.csv + " is empty");
    while (!header.empty() && (header.back() == '\r' || header.back() == '\n'))
        header.pop_back();

    std::vector<std::string> columns;
    std::stringstream hs(header);
    std::string cell;
    while (std::getline(hs, cell, ','))
        columns.push_back(cell);
    std::size_t xi = columns.size(), yi = columns.size();
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j] == opt.x_column)
            xi = j;
        if (columns[j] == opt.y_column)
            yi = j;
    }
    if (xi == columns.size())
        throw std::invalid_argument("fit: no column named '" + opt.x_column + "'");
    if (yi == columns.size())
        throw std::invalid_argument("fit: no column named '" + opt.y_column + "'");

    std::vector<double> xs, ys;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
            line.pop_back();
        if (line.empty())
            continue;
        std::stringstream ls(line);
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        if (cells.size() <= std::max(xi, yi))
            continue;
        try {
            const double x = std::stod(cells[xi]);
            const double y = std::stod(cells[yi]);
            if (std::isfinite(x) && std::isfinite(y)) {
                xs.push_back(x);
                ys.push_back(y);
            }
        } catch (const std::exception&) {
        }
    }

    const DecayFit fit = fit_decay(xs, ys, {opt.window_lo, opt.window_hi});
    std::cout << "samples   = " << xs.size() << "\n"
              << "window    = [" << format_double(fit.window.first) << ", "
              << format_double(fit.window.second) << "]\n"
              << "exponent  = " << format_double(fit.exponent) << "\n"
              << "amplitude = " << format_double(fit.amplitude) << "\n"
              << "r_squared = " << format_double(fit.r_squared) << "\n";
    return 0;
}

struct NormsOptions {
    std::string snapshot;
    double lorentz_p = 2.0;
    double lorentz_q = 2.0;
};

int run_norms(const NormsOptions& opt) {
    const SnapshotHeader header = read_snapshot_header(opt.snapshot);
    const Field f = read_snapshot(opt.snapshot);
    print_norm_table(f, header.sigma);
    std::cout << "lorentz(" << format_double(opt.lorentz_p) << ","
              << format_double(opt.lorentz_q)
              << ") = " << format_double(lorentz_norm(f, opt.lorentz_p, opt.lorentz_q)) << "\n";
    if (lp_norm(f, kInf) > 0.0) {
        const VectorFieldReport r = vector_field_report(f);
        std::cout << "lu_h1   = " << format_double(r.lu_h1) << "\n"
                  << "ks_gap  = " << format_double(r.ks_ratio) << "\n";
    }
    return 0;
}

struct ExperimentOptions {
    std::string config;
    std::string name;
    std::vector<std::string> overrides;
    std::string output_dir;
    bool quiet = false;
};

int run_experiment_cmd(const ExperimentOptions& opt) {
    std::string text;
    if (!opt.config.empty())
        text = slurp(opt.config);
    else if (!opt.name.empty())
        text = "experiment = " + opt.name + "\n";
    else
        throw std::invalid_argument("experiment: pass --config or --name");

    std::vector<std::string> overrides = opt.overrides;
    if (!opt.output_dir.empty())
        overrides.push_back("output_dir=" + opt.output_dir);
    text = merge_overrides(std::move(text), overrides);

    const ExperimentConfig cfg = parse_config_text(text);
    const ExperimentResult result = run_experiment(cfg);
    if (!opt.quiet)
        std::cout << report_text(result.report);
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudospectral laboratory for the derivative NLS family\n"
                 "  i u_t + u_xx + i (|u|^{2 sigma} u)_x = 0"};
    app.require_subcommand(1);

    SimulateOptions sim_opt;
    CLI::App* sim = app.add_subcommand("simulate", "Integrate small data and record norms");
    sim->add_option("--sigma", sim_opt.sigma, "nonlinearity power (config key: sigma)");
    sim->add_option("--epsilon", sim_opt.epsilon, "data amplitude (config key: epsilon)");
    sim->add_option("--n", sim_opt.n, "grid points (config key: n)");
    sim->add_option("--length", sim_opt.length, "box length (config key: length)");
    sim->add_option("--dt", sim_opt.dt, "time step (config key: dt)");
    sim->add_option("--t-end", sim_opt.t_end, "final time (config key: t_end)");
    sim->add_option("--snapshots-per-octave", sim_opt.per_octave,
                    "dyadic snapshot density (config key: snapshots_per_octave)");
    sim->add_option("--initial", sim_opt.initial,
                    "gaussian, chirped, random, or zero (config key: initial_data)");
    sim->add_option("--from", sim_opt.from_snapshot,
                    "start from a snapshot file instead of --initial");
    sim->add_option("--seed", sim_opt.seed, "rng seed for random data (config key: seed)");
    sim->add_option("--output-dir", sim_opt.output_dir,
                    "artifact directory (config key: output_dir)");

    SolitonOptions sol_opt;
    CLI::App* sol = app.add_subcommand("soliton", "Evaluate a solitary-wave profile");
    sol->add_option("--sigma", sol_opt.sigma, "nonlinearity power");
    sol->add_option("--omega", sol_opt.omega, "frequency, needs c^2 < 4 omega");
    sol->add_option("--c", sol_opt.c, "travel speed");
    sol->add_option("--n", sol_opt.n, "grid points");
    sol->add_option("--length", sol_opt.length, "box length");
    sol->add_option("--gauge", sol_opt.gauge, "divergence or advection");
    sol->add_option("--output", sol_opt.output, "write the profile as a snapshot file");

    PacketOptions pkt_opt;
    CLI::App* pkt = app.add_subcommand("packet",
                                       "Wave-packet diagnostics, standalone or on a snapshot");
    pkt->add_option("--snapshot", pkt_opt.snapshot,
                    "pair gamma_physical against gamma_fourier on this snapshot");
    pkt->add_option("--v", pkt_opt.v, "ray velocity");
    pkt->add_option("--t", pkt_opt.t, "packet time (standalone mode)");
    pkt->add_option("--n", pkt_opt.n, "grid points (standalone mode)");
    pkt->add_option("--length", pkt_opt.length, "box length (standalone mode)");

    FitOptions fit_opt;
    CLI::App* fit = app.add_subcommand("fit", "Power-law fit of a CSV column against time");
    fit->add_option("--csv", fit_opt.csv, "series file")->required();
    fit->add_option("--x", fit_opt.x_column, "time column name");
    fit->add_option("--y", fit_opt.y_column, "value column name")->required();
    fit->add_option("--window-lo", fit_opt.window_lo, "fit window start (>= 1)");
    fit->add_option("--window-hi", fit_opt.window_hi, "fit window end");

    NormsOptions norm_opt;
    CLI::App* nrm = app.add_subcommand("norms", "Norm table of a snapshot file");
    nrm->add_option("snapshot", norm_opt.snapshot, "snapshot file")->required();
    nrm->add_option("--lorentz-p", norm_opt.lorentz_p, "Lorentz primary index");
    nrm->add_option("--lorentz-q", norm_opt.lorentz_q, "Lorentz secondary index");

    ExperimentOptions exp_opt;
    CLI::App* exp = app.add_subcommand("experiment", "Run a standing experiment (E1..E5)");
    exp->add_option("--config", exp_opt.config, "key = value configuration file");
    exp->add_option("--name", exp_opt.name,
                    "experiment name E1..E5, reference parameters (config key: experiment)");
    exp->add_option("--set", exp_opt.overrides,
                    "override any config key, e.g. --set t_end=16 --set n=8192");
    exp->add_option("--output-dir", exp_opt.output_dir,
                    "artifact directory (config key: output_dir)");
    exp->add_flag("--quiet", exp_opt.quiet, "suppress the report echo on stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return run_simulate(sim_opt);
        if (sol->parsed())
            return run_soliton(sol_opt);
        if (pkt->parsed())
            return run_packet(pkt_opt);
        if (fit->parsed())
            return run_fit(fit_opt);
        if (nrm->parsed())
            return run_norms(norm_opt);
        if (exp->parsed())
            return run_experiment_cmd(exp_opt);
    } catch (const std::exception& e) {
        std::cerr << "gdnlab: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
