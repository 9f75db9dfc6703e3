#include "deltawall/emit.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace deltawall {

using nlohmann::ordered_json;

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

ordered_json number_or_symbol(double v) {
    if (std::isnan(v))
        return nullptr;
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return v;
}

ordered_json strength_json(const Strength& g) {
    if (g.is_plus_infinity())
        return "inf";
    if (g.is_minus_infinity())
        return "-inf";
    return g.value();
}

ordered_json well_json(const WellConfig& cfg) {
    return ordered_json{{"length", cfg.length},
                        {"hbar", cfg.hbar},
                        {"mass", cfg.mass},
                        {"e_star", cfg.e_star()},
                        {"g_star", cfg.g_star()}};
}

ordered_json stages_json(const CyclePath& cycle, const WellConfig& cfg) {
    ordered_json arr = ordered_json::array();
    for (const Stage& st : cycle.stages()) {
        ordered_json s;
        switch (st.kind) {
        case StageKind::Insert: s["kind"] = "insert"; break;
        case StageKind::Move: s["kind"] = "move"; break;
        case StageKind::Remove: s["kind"] = "remove"; break;
        case StageKind::Flip: s["kind"] = "flip"; break;
        }
        s["x_from"] = st.x_from;
        s["x_to"] = st.x_to;
        s["x_from_over_L"] = st.x_from / cfg.length;
        s["x_to_over_L"] = st.x_to / cfg.length;
        s["g_from"] = strength_json(st.g_from);
        s["g_to"] = strength_json(st.g_to);
        arr.push_back(std::move(s));
    }
    return arr;
}

ordered_json holonomy_json(const HolonomyMap& map) {
    ordered_json out;
    for (int i = 1; i <= map.degree(); ++i) {
        std::string key = std::to_string(i);
        if (auto im = map.image(i))
            out[key] = *im;
        else if (auto r = map.exit_reason(i))
            out[key] = (*r == ExitReason::DivergedBelow) ? "-inf" : "exit";
        else
            out[key] = nullptr;
    }
    return out;
}

namespace {

const char* branch_name(Branch b) {
    return b == Branch::Oscillatory ? "oscillatory" : "evanescent";
}

std::string side_name(const Level& lv) {
    return lv.side ? lv.side->str() : std::string();
}

std::string strength_csv(const Strength& g) {
    if (g.is_plus_infinity())
        return "inf";
    if (g.is_minus_infinity())
        return "-inf";
    return format_double(g.value());
}

} // namespace

std::string spectrum_json(const Spectrum& s, const WellConfig& cfg) {
    ordered_json root;
    root["schema_version"] = schema_version;
    root["kind"] = "spectrum";
    root["well"] = well_json(cfg);
    root["wall"] = ordered_json{{"position", s.wall.position},
                                {"position_over_L", s.wall.position / cfg.length},
                                {"g_or_inf", strength_json(s.wall.strength)}};
    ordered_json levels = ordered_json::array();
    double estar = cfg.e_star();
    for (const Level& lv : s.levels) {
        ordered_json j;
        j["n"] = lv.index;
        j["energy"] = number_or_symbol(lv.energy);
        j["energy_over_estar"] = number_or_symbol(lv.energy / estar);
        j["branch"] = branch_name(lv.branch);
        j["wavenumber"] = number_or_symbol(lv.wavenumber);
        j["side"] = lv.side ? ordered_json(lv.side->str()) : ordered_json(nullptr);
        j["exceptional"] = lv.exceptional;
        levels.push_back(std::move(j));
    }
    root["levels"] = std::move(levels);
    ordered_json exc = ordered_json::array();
    for (int n : s.exceptional_levels)
        exc.push_back(n);
    root["exceptional_levels"] = std::move(exc);
    return root.dump(2) + "\n";
}

std::string spectrum_csv(const Spectrum& s, const WellConfig& cfg) {
    std::ostringstream out;
    out << "n,energy,energy_over_estar,branch,wavenumber,side,exceptional\n";
    double estar = cfg.e_star();
    for (const Level& lv : s.levels) {
        out << lv.index << ',' << format_double(lv.energy) << ','
            << format_double(lv.energy / estar) << ',' << branch_name(lv.branch)
            << ',' << format_double(lv.wavenumber) << ',' << side_name(lv)
            << ',' << (lv.exceptional ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string flow_json(const CyclePath& cycle, const SpectralFlow& f,
                      const WellConfig& cfg) {
    ordered_json root;
    root["schema_version"] = schema_version;
    root["kind"] = "trace";
    root["well"] = well_json(cfg);
    root["n_max"] = f.n_max;
    root["cycle"] = stages_json(cycle, cfg);
    double estar = cfg.e_star();
    ordered_json samples = ordered_json::array();
    for (const FlowSample& fs : f.samples) {
        ordered_json j;
        j["stage"] = fs.stage;
        j["s"] = fs.s;
        j["x"] = fs.x;
        j["x_over_L"] = fs.x / cfg.length;
        j["g_or_inf"] = strength_json(fs.g);
        ordered_json en = ordered_json::array();
        ordered_json en_scaled = ordered_json::array();
        for (double e : fs.energies) {
            en.push_back(number_or_symbol(e));
            en_scaled.push_back(number_or_symbol(e / estar));
        }
        j["energies"] = std::move(en);
        j["energies_over_estar"] = std::move(en_scaled);
        samples.push_back(std::move(j));
    }
    root["samples"] = std::move(samples);
    ordered_json events = ordered_json::array();
    for (const CrossingEvent& ev : f.events) {
        events.push_back(ordered_json{{"stage", ev.stage},
                                      {"position", ev.position},
                                      {"position_over_L", ev.position / cfg.length},
                                      {"m_left", ev.m_left},
                                      {"m_right", ev.m_right},
                                      {"rank_low", ev.rank_low},
                                      {"energy", ev.energy},
                                      {"energy_over_estar", ev.energy / estar}});
    }
    root["events"] = std::move(events);
    root["holonomy"] = holonomy_json(f.map);
    if (f.map.is_total())
        root["permutation"] = f.map.permutation().cycle_notation();
    else
        root["permutation"] = nullptr;
    return root.dump(2) + "\n";
}

std::string flow_csv(const SpectralFlow& f, const WellConfig& cfg) {
    std::ostringstream out;
    out << "stage,s,x,x_over_L,g";
    for (int t = 1; t <= f.n_max; ++t)
        out << ",track_" << t;
    for (int t = 1; t <= f.n_max; ++t)
        out << ",track_" << t << "_over_estar";
    out << '\n';
    double estar = cfg.e_star();
    for (const FlowSample& fs : f.samples) {
        out << fs.stage << ',' << format_double(fs.s) << ','
            << format_double(fs.x) << ',' << format_double(fs.x / cfg.length)
            << ',' << strength_csv(fs.g);
        for (double e : fs.energies)
            out << ',' << format_double(e);
        for (double e : fs.energies)
            out << ',' << format_double(e / estar);
        out << '\n';
    }
    return out.str();
}

std::string plan_json(int source, int target,
                      const std::vector<CyclePath>& plan,
                      const WellConfig& cfg) {
    ordered_json root;
    root["schema_version"] = schema_version;
    root["kind"] = "plan";
    root["well"] = well_json(cfg);
    root["source"] = source;
    root["target"] = target;
    ordered_json cycles = ordered_json::array();
    for (const CyclePath& c : plan)
        cycles.push_back(stages_json(c, cfg));
    root["cycles"] = std::move(cycles);
    int window = std::max(source, target) + 1;
    HolonomyMap composed = composed_holonomy(plan, window, cfg);
    root["window"] = window;
    root["composed_holonomy"] = holonomy_json(composed);
    if (composed.is_total())
        root["composed_permutation"] = composed.permutation().cycle_notation();
    else
        root["composed_permutation"] = nullptr;
    return root.dump(2) + "\n";
}

std::string plan_csv(const std::vector<CyclePath>& plan,
                     const WellConfig& cfg) {
    std::ostringstream out;
    out << "cycle,stage,kind,x_from,x_to,x_from_over_L,x_to_over_L,g_from,g_to\n";
    for (std::size_t ci = 0; ci < plan.size(); ++ci) {
        const auto& stages = plan[ci].stages();
        for (std::size_t si = 0; si < stages.size(); ++si) {
            const Stage& st = stages[si];
            const char* kind = "";
            switch (st.kind) {
            case StageKind::Insert: kind = "insert"; break;
            case StageKind::Move: kind = "move"; break;
            case StageKind::Remove: kind = "remove"; break;
            case StageKind::Flip: kind = "flip"; break;
            }
            out << ci << ',' << si << ',' << kind << ','
                << format_double(st.x_from) << ',' << format_double(st.x_to)
                << ',' << format_double(st.x_from / cfg.length) << ','
                << format_double(st.x_to / cfg.length) << ',' << strength_csv(st.g_from)
                << ',' << strength_csv(st.g_to) << '\n';
        }
    }
    return out.str();
}

std::string evolve_json(const CyclePath& cycle, const Protocol& protocol,
                        const Grid& grid, const std::vector<double>& times,
                        const std::vector<std::vector<double>>& fidelities,
                        double max_norm_drift, const WellConfig& cfg) {
    ordered_json root;
    root["schema_version"] = schema_version;
    root["kind"] = "evolve";
    root["well"] = well_json(cfg);
    root["cycle"] = stages_json(cycle, cfg);
    root["grid_points"] = grid.points;
    root["duration"] = protocol.duration();
    root["g_cap"] = protocol.g_cap();
    root["g_cap_over_gstar"] = protocol.g_cap() / cfg.g_star();
    root["max_norm_drift"] = max_norm_drift;
    ordered_json samples = ordered_json::array();
    for (std::size_t i = 0; i < times.size(); ++i) {
        ordered_json j;
        j["t"] = times[i];
        j["t_over_T"] = times[i] / protocol.duration();
        ordered_json fid = ordered_json::array();
        for (double f : fidelities[i])
            fid.push_back(f);
        j["fidelities"] = std::move(fid);
        samples.push_back(std::move(j));
    }
    root["samples"] = std::move(samples);
    return root.dump(2) + "\n";
}

std::string evolve_csv(const std::vector<double>& times,
                       const std::vector<std::vector<double>>& fidelities) {
    std::ostringstream out;
    out << "t";
    if (!fidelities.empty())
        for (std::size_t j = 0; j < fidelities.front().size(); ++j)
            out << ",fidelity_" << (j + 1);
    out << '\n';
    for (std::size_t i = 0; i < times.size(); ++i) {
        out << format_double(times[i]);
        for (double f : fidelities[i])
            out << ',' << format_double(f);
        out << '\n';
    }
    return out.str();
}

} // namespace deltawall
