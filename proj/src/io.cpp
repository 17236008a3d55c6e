#include "impulse/io.hpp"

#include "impulse/error.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace impulse::io {

std::string fmt(double x) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}

json to_json(const TrigSeries& s) {
    json modes = json::array();
    for (const auto& m : s.modes) modes.push_back({{"amp", m.amp}, {"freq", m.freq}, {"phase", m.phase}});
    return {{"mean", s.mean}, {"modes", modes}};
}

namespace {

std::vector<Mode> modes_from_json(const json& arr) {
    std::vector<Mode> out;
    for (const auto& m : arr) {
        out.push_back({m.at("amp").get<double>(), m.at("freq").get<double>(), m.value("phase", 0.0)});
    }
    return out;
}

}  // namespace

TrigSeries trig_from_json(const json& j) {
    if (j.is_number()) return TrigSeries(j.get<double>());
    if (!j.is_object()) throw Error("expected a number or {mean, modes}");
    return TrigSeries(j.value("mean", 0.0), j.contains("modes") ? modes_from_json(j.at("modes")) : std::vector<Mode>{});
}

json to_json(const APSpec& spec) {
    json modes = json::array();
    for (const auto& m : spec.modes) modes.push_back({{"amp", m.amp}, {"freq", m.freq}, {"phase", m.phase}});
    return {{"a", spec.a}, {"modes", modes}, {"clamp", spec.clamp}};
}

APSpec apspec_from_json(const json& j) {
    APSpec s;
    s.a = j.at("a").get<double>();
    if (j.contains("modes")) s.modes = modes_from_json(j.at("modes"));
    s.clamp = j.value("clamp", 0.0);
    return s;
}

json to_json(const SpectralVector& u) { return json(u.vec()); }

std::string times_csv(const ImpulseTimes& times) {
    std::ostringstream os;
    os << "index,time\n";
    for (long j = times.j_min(); j <= times.j_max(); ++j) os << j << ',' << fmt(times[j]) << '\n';
    return os.str();
}

std::string spectral_csv(const SpectralVector& u) {
    std::ostringstream os;
    os << "k,a_k\n";
    for (std::size_t i = 0; i < u.size(); ++i) os << i + 1 << ',' << fmt(u[i]) << '\n';
    return os.str();
}

std::string solution_csv(const GridSolution& sol) {
    std::ostringstream os;
    os << "j,t,k,a_k\n";
    for (const auto& iv : sol.intervals()) {
        for (std::size_t n = 0; n < iv.t.size(); ++n) {
            const std::string t = fmt(iv.t[n]);
            for (std::size_t i = 0; i < iv.u[n].size(); ++i) {
                os << iv.j << ',' << t << ',' << i + 1 << ',' << fmt(iv.u[n][i]) << '\n';
            }
        }
    }
    return os.str();
}

json solution_json(const GridSolution& sol) {
    json ivs = json::array();
    for (const auto& iv : sol.intervals()) {
        json rows = json::array();
        for (const auto& u : iv.u) rows.push_back(to_json(u));
        ivs.push_back({{"j", iv.j}, {"t", iv.t}, {"u", rows}});
    }
    return {{"alpha", sol.alpha()}, {"K", sol.K()}, {"intervals", ivs}};
}

std::string trajectory_csv(const Trajectory& tr) {
    std::ostringstream os;
    os << "t,k,a_k\n";
    for (const auto& seg : tr.segments) {
        for (std::size_t n = 0; n < seg.t.size(); ++n) {
            const std::string t = fmt(seg.t[n]);
            for (std::size_t i = 0; i < seg.u[n].size(); ++i) os << t << ',' << i + 1 << ',' << fmt(seg.u[n][i]) << '\n';
        }
    }
    return os.str();
}

std::string crossings_csv(const Trajectory& tr, double alpha) {
    std::ostringstream os;
    os << "j,t_cross,pre_norm,post_norm\n";
    for (const auto& c : tr.crossings) {
        os << c.j << ',' << fmt(c.t) << ',' << fmt(alpha_norm(c.u_before, alpha)) << ','
           << fmt(alpha_norm(c.u_after, alpha)) << '\n';
    }
    return os.str();
}

std::string impulses_csv(const GridSolution& sol) {
    std::ostringstream os;
    os << "j,t_cross,pre_norm,post_norm\n";
    for (std::size_t i = 1; i < sol.intervals().size(); ++i) {
        const auto& iv = sol.intervals()[i];
        const auto& prev = sol.intervals()[i - 1];
        os << iv.j << ',' << fmt(iv.left()) << ',' << fmt(alpha_norm(prev.u.back(), sol.alpha())) << ','
           << fmt(alpha_norm(iv.u.front(), sol.alpha())) << '\n';
    }
    return os.str();
}

std::string history_csv(const std::vector<double>& history) {
    std::ostringstream os;
    os << "iter,sup_diff\n";
    for (std::size_t i = 0; i < history.size(); ++i) os << i + 1 << ',' << fmt(history[i]) << '\n';
    return os.str();
}

}  // namespace impulse::io
