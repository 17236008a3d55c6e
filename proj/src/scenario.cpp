#include "impulse/scenario.hpp"

#include "impulse/io.hpp"

#include <fstream>

namespace impulse {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
    throw ConfigError("config field '" + field + "': " + msg);
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.is_object() || !obj.contains(key)) fail(path.empty() ? key : path + "." + key, "missing");
    return obj.at(key);
}

double number(const json& j, const std::string& field) {
    if (!j.is_number()) fail(field, "expected a number");
    return j.get<double>();
}

long integer(const json& j, const std::string& field) {
    if (!j.is_number_integer()) fail(field, "expected an integer");
    return j.get<long>();
}

double number_or(const json& obj, const std::string& path, const std::string& key, double dflt) {
    if (!obj.contains(key)) return dflt;
    return number(obj.at(key), path + "." + key);
}

TrigSeries trig(const json& j, const std::string& field) {
    try {
        return io::trig_from_json(j);
    } catch (const std::exception& e) {
        fail(field, e.what());
    }
}

std::vector<double> profile(const json& j, std::size_t K, const std::string& field) {
    if (j.is_string()) {
        if (j.get<std::string>() == "parabola") return parabola_profile(K).vec();
        fail(field, "unknown profile name (expected \"parabola\" or an array)");
    }
    if (!j.is_array()) fail(field, "expected an array of sine coefficients");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
    if (out.size() > K) fail(field, "more coefficients than K");
    return out;
}

std::vector<SignalTerm> signal_terms(const json& arr, std::size_t K, const std::string& field) {
    if (!arr.is_array()) fail(field, "expected an array");
    std::vector<SignalTerm> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string f = field + "[" + std::to_string(i) + "]";
        out.push_back({trig(require(arr[i], f, "signal"), f + ".signal"), profile(require(arr[i], f, "profile"), K, f + ".profile")});
    }
    return out;
}

LipschitzToy toy(const json& j, const std::string& field) {
    LipschitzToy t;
    const std::string shape = j.value("shape", "linear");
    if (shape == "linear") {
        t.shape = LipschitzToy::Shape::Linear;
    } else if (shape == "sine") {
        t.shape = LipschitzToy::Shape::Sine;
    } else {
        fail(field + ".shape", "expected \"linear\" or \"sine\"");
    }
    t.gain = number(require(j, field, "gain"), field + ".gain");
    if (j.contains("modes")) {
        for (const auto& m : j.at("modes")) t.modes.push_back(static_cast<int>(integer(m, field + ".modes")));
    }
    return t;
}

JumpTerm jump_term(const json& j, std::size_t K, const std::string& field) {
    const std::string type = require(j, field, "type").get<std::string>();
    if (type == "scalar") return ScalarJump{trig(require(j, field, "factor"), field + ".factor")};
    if (type == "shift") return ShiftJump{trig(require(j, field, "b"), field + ".b")};
    if (type == "coupling") return CouplingJump{trig(require(j, field, "b"), field + ".b")};
    if (type == "diagonal") {
        DiagonalJump d;
        d.multipliers = profile(require(j, field, "multipliers"), K, field + ".multipliers");
        d.multipliers.resize(K, 0.0);
        if (j.contains("scale")) d.scale = trig(j.at("scale"), field + ".scale");
        return d;
    }
    fail(field + ".type", "unknown jump type '" + type + "'");
}

}  // namespace

const json& Scenario::section(const std::string& key) const { return require(checks, "checks", key); }

Scenario parse_scenario(const json& doc, std::optional<std::uint64_t> seed_override) {
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    Scenario sc;
    sc.config = doc;
    sc.name = require(doc, "", "name").get<std::string>();
    if (sc.name.empty() || sc.name.find('/') != std::string::npos) fail("name", "must be a non-empty file name");
    const long K = integer(require(doc, "", "K"), "K");
    if (K < 1 || K > 256) fail("K", "must lie in [1, 256]");
    sc.K = static_cast<std::size_t>(K);
    sc.alpha = number(require(doc, "", "alpha"), "alpha");
    if (!(sc.alpha >= 0.0 && sc.alpha < 1.0)) fail("alpha", "must lie in [0, 1)");
    sc.seed = doc.contains("seed") ? static_cast<std::uint64_t>(integer(doc.at("seed"), "seed")) : 1;
    if (seed_override) {
        sc.seed = *seed_override;
        sc.config["seed"] = sc.seed;
    }

    const json& win = require(doc, "", "window");
    const long j_min = integer(require(win, "window", "j_min"), "window.j_min");
    const long j_max = integer(require(win, "window", "j_max"), "window.j_max");
    if (j_max - j_min < 60) fail("window", "needs at least 60 impulse intervals");

    APSpec spec;
    try {
        spec = io::apspec_from_json(require(doc, "", "times"));
        spec.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        fail("times", e.what());
    }
    sc.sys.K = sc.K;
    sc.sys.times = gen_times(spec, j_min, j_max);

    if (doc.contains("drift")) {
        const json& d = doc.at("drift");
        sc.sys.c = number_or(d, "drift", "c", 0.0);
        if (d.contains("modulation")) sc.sys.modulation = trig(d.at("modulation"), "drift.modulation");
    }
    if (doc.contains("jumps")) {
        const json& js = doc.at("jumps");
        if (!js.is_array()) fail("jumps", "expected an array");
        for (std::size_t i = 0; i < js.size(); ++i) sc.sys.jumps.add(jump_term(js[i], sc.K, "jumps[" + std::to_string(i) + "]"));
    }
    try {
        sc.sys.validate();
    } catch (const std::exception& e) {
        fail("drift", e.what());
    }

    if (doc.contains("nonlinearity")) {
        const json& n = doc.at("nonlinearity");
        const std::string type = require(n, "nonlinearity", "type").get<std::string>();
        const double rho = number_or(n, "nonlinearity", "rho", 1.0);
        if (!(rho > 0.0)) fail("nonlinearity.rho", "must be positive");
        if (type == "zero") {
            sc.nonlin = Nonlinearity(ZeroNonlinearity{}, sc.alpha, rho);
        } else if (type == "advection") {
            Advection a;
            a.a = trig(require(n, "nonlinearity", "a"), "nonlinearity.a");
            if (n.contains("b_modes")) {
                for (const auto& b : n.at("b_modes")) a.b_modes.push_back(trig(b, "nonlinearity.b_modes"));
            }
            sc.nonlin = Nonlinearity(a, sc.alpha, rho);
        } else if (type == "toy") {
            sc.nonlin = Nonlinearity(toy(n, "nonlinearity"), sc.alpha, rho);
        } else {
            fail("nonlinearity.type", "unknown type '" + type + "'");
        }
    } else {
        sc.nonlin = Nonlinearity(ZeroNonlinearity{}, sc.alpha, 1.0);
    }
    if (doc.contains("impulse_map")) {
        const json& g = doc.at("impulse_map");
        sc.g_map.map = toy(g, "impulse_map");
        if (g.contains("scale")) sc.g_map.scale = trig(g.at("scale"), "impulse_map.scale");
    }
    if (doc.contains("forcing")) {
        const json& f = doc.at("forcing");
        if (f.contains("f")) sc.forcing.f_terms = signal_terms(f.at("f"), sc.K, "forcing.f");
        if (f.contains("g")) sc.forcing.g_terms = signal_terms(f.at("g"), sc.K, "forcing.g");
    }
    if (doc.contains("surfaces")) {
        sc.surfaces = SurfaceSpec{sc.sys.times, trig(require(doc.at("surfaces"), "surfaces", "slope"), "surfaces.slope")};
    }

    const json& out = require(doc, "", "output");
    sc.output.j_first = integer(require(out, "output", "j_first"), "output.j_first");
    sc.output.j_last = integer(require(out, "output", "j_last"), "output.j_last");
    if (!(sc.output.j_first < sc.output.j_last) || sc.output.j_first <= j_min || sc.output.j_last >= j_max) {
        fail("output", "must be a nonempty range strictly inside the window");
    }

    sc.solver.alpha = sc.alpha;
    if (doc.contains("solver")) {
        const json& s = doc.at("solver");
        sc.solver.tail_tol = number_or(s, "solver", "tail_tol", sc.solver.tail_tol);
        sc.solver.nodes_per_interval =
            static_cast<std::size_t>(number_or(s, "solver", "nodes_per_interval", static_cast<double>(sc.solver.nodes_per_interval)));
        sc.solver.gauss_order =
            static_cast<std::size_t>(number_or(s, "solver", "gauss_order", static_cast<double>(sc.solver.gauss_order)));
        const std::string layout = s.value("layout", "chebyshev");
        if (layout == "chebyshev") {
            sc.solver.layout = NodeLayout::Chebyshev;
        } else if (layout == "uniform") {
            sc.solver.layout = NodeLayout::Uniform;
        } else {
            fail("solver.layout", "expected \"chebyshev\" or \"uniform\"");
        }
        sc.picard.tol = number_or(s, "solver", "picard_tol", sc.picard.tol);
        sc.picard.max_iter =
            static_cast<std::size_t>(number_or(s, "solver", "picard_max_iter", static_cast<double>(sc.picard.max_iter)));
        sc.measure = s.value("measure_dichotomy", true);
        if (!(sc.solver.tail_tol > 0.0 && sc.solver.tail_tol < 1.0)) fail("solver.tail_tol", "must lie in (0, 1)");
        if (sc.solver.nodes_per_interval < 8) fail("solver.nodes_per_interval", "must be at least 8");
        if (!(sc.picard.tol > 0.0)) fail("solver.picard_tol", "must be positive");
    }
    sc.checks = doc.value("checks", json::object());
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return parse_scenario(doc, seed_override);
}

}  // namespace impulse
