// Command line front end: spectra, cycle traces, connection plans, and
// time-dependent checks for the particle in a box with a movable,
// variable-strength delta wall.
//
// Exit codes: 0 on success, 2 on invalid arguments or domain validation
// failures, 3 on numeric runtime failures.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>

#include "deltawall/cycles.hpp"
#include "deltawall/emit.hpp"
#include "deltawall/oracle.hpp"
#include "deltawall/spectral.hpp"
#include "deltawall/tdse.hpp"

namespace {

using namespace deltawall;

struct CommonOpts {
    double length = 1.0;
    double hbar = 1.0;
    double mass = 1.0;
    std::string format = "json";
    std::string output;

    WellConfig well() const { return WellConfig{length, hbar, mass}; }
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--L", o.length, "box length")->capture_default_str();
    cmd->add_option("--hbar", o.hbar, "reduced Planck constant")
        ->capture_default_str();
    cmd->add_option("--mass", o.mass, "particle mass")->capture_default_str();
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--output", o.output, "write to this file instead of stdout");
}

Strength parse_strength(const std::string& text) {
    if (text == "inf" || text == "+inf")
        return Strength::plus_infinity();
    if (text == "-inf")
        return Strength::minus_infinity();
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse strength '" + text + "'");
    }
    if (used != text.size())
        throw std::invalid_argument("cannot parse strength '" + text + "'");
    return Strength::finite(v);
}

// true if a summary line may be printed without polluting the payload
bool emit_payload(const CommonOpts& o, const std::string& payload) {
    if (o.output.empty()) {
        std::cout << payload;
        return false;
    }
    std::ofstream out(o.output, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file " + o.output);
    out << payload;
    if (!out)
        throw std::runtime_error("failed writing output file " + o.output);
    return true;
}

struct CycleOpts {
    std::string kind = "cx";
    double x0 = 0.0;
    double x1 = 0.0;
    bool inverse = false;
};

void add_cycle(CLI::App* cmd, CycleOpts& c, bool* x1_given) {
    cmd->add_option("--cycle", c.kind, "cycle family")
        ->check(CLI::IsMember({"cx", "cy"}))
        ->capture_default_str();
    cmd->add_option("--x0", c.x0, "insertion position")->required();
    auto* opt = cmd->add_option("--x1", c.x1, "removal position (cx only)");
    if (x1_given)
        cmd->callback([opt, x1_given]() { *x1_given = opt->count() > 0; });
    cmd->add_flag("--inverse", c.inverse, "run the cycle in reverse");
}

CyclePath build_cycle(const CycleOpts& c, bool x1_given, const WellConfig& cfg) {
    CyclePath path = [&] {
        if (c.kind == "cx") {
            if (!x1_given)
                throw std::invalid_argument("--x1 is required for --cycle cx");
            return make_cx(c.x0, c.x1, cfg);
        }
        if (x1_given)
            throw std::invalid_argument("--x1 is only meaningful for --cycle cx");
        return make_cy(c.x0, cfg);
    }();
    return c.inverse ? path.inverse() : path;
}

int run(int argc, char** argv) {
    CLI::App app{"spectra and adiabatic cycles for the delta-wall box"};
    app.require_subcommand(1);

    // --- spectrum ---
    auto* sp = app.add_subcommand("spectrum",
                                  "eigenvalues for a fixed wall state");
    CommonOpts sp_common;
    std::string sp_g = "0";
    double sp_x = 0.5;
    int sp_nmax = 6;
    sp->add_option("--g", sp_g, "wall strength (number, inf, or -inf)")
        ->capture_default_str();
    sp->add_option("--x", sp_x, "wall position")->required();
    sp->add_option("--n-max", sp_nmax, "number of levels")
        ->capture_default_str();
    add_common(sp, sp_common);

    // --- trace ---
    auto* tr = app.add_subcommand("trace",
                                  "eigenvalue flow along an adiabatic cycle");
    CommonOpts tr_common;
    CycleOpts tr_cycle;
    bool tr_x1_given = false;
    int tr_nmax = 4;
    int tr_steps = 64;
    add_cycle(tr, tr_cycle, &tr_x1_given);
    tr->add_option("--n-max", tr_nmax, "tracked window size")
        ->capture_default_str();
    tr->add_option("--steps", tr_steps, "samples per ramped stage")
        ->capture_default_str();
    add_common(tr, tr_common);

    // --- plan ---
    auto* pl = app.add_subcommand("plan",
                                  "cycle sequence connecting two levels");
    CommonOpts pl_common;
    int pl_from = 1, pl_to = 2;
    pl->add_option("--from", pl_from, "source level")->required();
    pl->add_option("--to", pl_to, "target level")->required();
    add_common(pl, pl_common);

    // --- evolve ---
    auto* ev = app.add_subcommand(
        "evolve", "time-dependent propagation of a capped cycle protocol");
    CommonOpts ev_common;
    CycleOpts ev_cycle;
    bool ev_x1_given = false;
    double ev_T = 10.0;
    double ev_gcap = 0.0;  // 0: use 50 g_star
    int ev_grid = 512;
    double ev_dt = 1e-3;
    int ev_nmax = 4;
    int ev_stride = 50;
    int ev_start = 1;
    add_cycle(ev, ev_cycle, &ev_x1_given);
    ev->add_option("--T", ev_T, "total protocol duration")
        ->capture_default_str();
    ev->add_option("--g-cap", ev_gcap,
                   "strength cap (default 50 g_star of the well)");
    ev->add_option("--grid", ev_grid, "interior grid points")
        ->capture_default_str();
    ev->add_option("--dt", ev_dt, "integrator step")->capture_default_str();
    ev->add_option("--n-max", ev_nmax, "levels in the fidelity report")
        ->capture_default_str();
    ev->add_option("--record-stride", ev_stride,
                   "steps between recorded samples")
        ->capture_default_str();
    ev->add_option("--start-level", ev_start, "initially prepared level")
        ->capture_default_str();

    add_common(ev, ev_common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (sp->parsed()) {
        WellConfig cfg = sp_common.well();
        WallState wall{sp_x, parse_strength(sp_g)};
        Spectrum s = solve_spectrum(wall, sp_nmax, cfg);
        std::string payload = (sp_common.format == "json")
                                  ? spectrum_json(s, cfg)
                                  : spectrum_csv(s, cfg);
        emit_payload(sp_common, payload);
        return 0;
    }

    if (tr->parsed()) {
        WellConfig cfg = tr_common.well();
        CyclePath cycle = build_cycle(tr_cycle, tr_x1_given, cfg);
        SpectralFlow flow = trace(cycle, tr_nmax, tr_steps, cfg);
        std::string payload = (tr_common.format == "json")
                                  ? flow_json(cycle, flow, cfg)
                                  : flow_csv(flow, cfg);
        if (emit_payload(tr_common, payload)) {
            std::cout << "holonomy: " << flow.map.str() << "\n";
            if (flow.map.is_total())
                std::cout << "permutation: "
                          << flow.map.permutation().cycle_notation() << "\n";
        }
        return 0;
    }

    if (pl->parsed()) {
        WellConfig cfg = pl_common.well();
        auto cycles = plan_connection(pl_from, pl_to, cfg);
        std::string payload = (pl_common.format == "json")
                                  ? plan_json(pl_from, pl_to, cycles, cfg)
                                  : plan_csv(cycles, cfg);
        emit_payload(pl_common, payload);
        return 0;
    }

    if (ev->parsed()) {
        WellConfig cfg = ev_common.well();
        if (ev_stride < 1)
            throw std::invalid_argument("--record-stride must be at least 1");
        if (ev_start < 1 || ev_start > ev_nmax)
            throw std::invalid_argument("--start-level must lie in [1, n-max]");
        CyclePath cycle = build_cycle(ev_cycle, ev_x1_given, cfg);
        double g_cap = (ev_gcap > 0.0) ? ev_gcap : 50.0 * cfg.g_star();
        Protocol protocol = make_protocol(cycle, ev_T, g_cap, ev_nmax, cfg);
        Grid grid{ev_grid, cfg};
        WallState start_wall = protocol.at(0.0);
        GridLevels init = instantaneous_levels(start_wall, grid, ev_start);
        EvolveOptions opts;
        opts.dt = ev_dt;
        opts.record_stride = ev_stride;
        EvolveResult res = evolve(protocol, init.modes[ev_start - 1], grid, opts);
        std::vector<std::vector<double>> fids(res.times.size());
        for (std::size_t i = 0; i < res.times.size(); ++i) {
            const WaveField& state =
                res.states.empty() ? res.psi : res.states[i];
            GridLevels lv =
                instantaneous_levels(protocol.at(res.times[i]), grid, ev_nmax);
            fids[i].resize(ev_nmax);
            for (int j = 0; j < ev_nmax; ++j)
                fids[i][j] = fidelity(state, lv.modes[j], grid);
        }
        std::string payload =
            (ev_common.format == "json")
                ? evolve_json(cycle, protocol, grid, res.times, fids,
                              res.max_norm_drift, cfg)
                : evolve_csv(res.times, fids);
        if (emit_payload(ev_common, payload)) {
            std::cout << "final fidelities:";
            for (double f : fids.back())
                std::cout << " " << format_double(f);
            std::cout << "\n";
        }
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const deltawall::NormDriftError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const deltawall::BranchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
}
