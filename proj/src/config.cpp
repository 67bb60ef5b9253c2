#include "shjb/config.hpp"

#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "shjb/presets.hpp"

namespace shjb {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw std::runtime_error("config error at " + where + ": " + what);
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || item.key() == k;
        if (!ok) fail(where, "unknown key '" + item.key() + "'");
    }
}

CoefficientField parse_coefficient(const json& j, const std::string& where) {
    if (j.is_number()) return CoefficientField::constant(j.get<double>());
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return CoefficientField::infinite();
        fail(where, "expected a number, \"inf\", or a family object");
    }
    if (!j.is_object()) fail(where, "expected a number, \"inf\", or a family object");
    const std::string family = j.value("family", "");
    if (family == "constant") {
        check_keys(j, where, {"family", "value"});
        return CoefficientField::constant(j.at("value").get<double>());
    }
    if (family == "tanh_affine") {
        check_keys(j, where, {"family", "base", "amplitude", "slope"});
        return CoefficientField::tanh_affine(j.at("base").get<double>(),
                                             j.at("amplitude").get<double>(),
                                             j.at("slope").get<double>());
    }
    if (family == "bounded_sin") {
        check_keys(j, where, {"family", "base", "amplitude", "frequency"});
        return CoefficientField::bounded_sin(j.at("base").get<double>(),
                                             j.at("amplitude").get<double>(),
                                             j.at("frequency").get<double>());
    }
    fail(where, "unknown coefficient family '" + family + "'");
}

ModelSpec parse_model(const json& j) {
    if (j.contains("preset")) {
        check_keys(j, "model", {"preset"});
        const std::string name = j.at("preset").get<std::string>();
        if (!is_preset(name)) fail("model.preset", "unknown preset '" + name + "'");
        return make_preset(name);
    }
    check_keys(j, "model", {"T", "coefficients", "dark_pool"});
    ModelSpec m;
    m.T = j.value("T", 1.0);
    if (j.contains("coefficients")) {
        const json& c = j.at("coefficients");
        check_keys(c, "model.coefficients", {"b", "sigma", "sigma_bar", "eta", "lambda"});
        if (c.contains("b")) m.b = parse_coefficient(c.at("b"), "model.coefficients.b");
        if (c.contains("sigma"))
            m.sigma = parse_coefficient(c.at("sigma"), "model.coefficients.sigma");
        if (c.contains("sigma_bar"))
            m.sigma_bar = parse_coefficient(c.at("sigma_bar"), "model.coefficients.sigma_bar");
        if (c.contains("eta")) m.eta = parse_coefficient(c.at("eta"), "model.coefficients.eta");
        if (c.contains("lambda"))
            m.lambda = parse_coefficient(c.at("lambda"), "model.coefficients.lambda");
    }
    if (j.contains("dark_pool")) {
        const json& dp = j.at("dark_pool");
        if (!dp.is_array()) fail("model.dark_pool", "expected an array of atoms");
        int next_id = 0;
        for (const json& atom : dp) {
            check_keys(atom, "model.dark_pool[]", {"z_id", "gamma", "mu"});
            DarkPoolAtom a;
            a.z_id = atom.value("z_id", next_id);
            a.gamma = parse_coefficient(atom.at("gamma"), "model.dark_pool[].gamma");
            a.mu = atom.at("mu").get<double>();
            if (a.mu < 0.0) fail("model.dark_pool[].mu", "negative atom weight");
            m.dark_pool.atoms.push_back(a);
            ++next_id;
        }
    }
    return m;
}

}  // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config parse error in " + path + ": " + e.what());
    }
    check_keys(j, "<root>",
               {"model", "grid", "singular", "solve", "mc", "verify", "output_dir"});

    RunConfig cfg;
    if (!j.contains("model")) fail("<root>", "missing 'model' section");
    cfg.model = parse_model(j.at("model"));
    cfg.grid.T = cfg.model.T;

    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, "grid", {"y_min", "y_max", "n_y", "dt"});
        cfg.grid.y_min = g.value("y_min", cfg.grid.y_min);
        cfg.grid.y_max = g.value("y_max", cfg.grid.y_max);
        cfg.grid.n_y = g.value("n_y", cfg.grid.n_y);
        cfg.grid.dt = g.value("dt", cfg.grid.dt);
        cfg.grid.validate();
    }
    if (j.contains("singular")) {
        const json& s = j.at("singular");
        check_keys(s, "singular", {"delta", "tol", "N0"});
        cfg.singular.delta = s.value("delta", cfg.singular.delta);
        cfg.singular.tol = s.value("tol", cfg.singular.tol);
        cfg.singular.N0 = s.value("N0", cfg.singular.N0);
        if (cfg.singular.delta <= 0.0 || cfg.singular.delta >= cfg.model.T)
            fail("singular.delta", "must lie in (0, T)");
        if (cfg.singular.N0 <= 0.0) fail("singular.N0", "must be positive");
    }
    if (j.contains("solve")) {
        const json& s = j.at("solve");
        check_keys(s, "solve", {"N"});
        cfg.solve.N = s.value("N", 0.0);
    }
    if (j.contains("mc")) {
        const json& m = j.at("mc");
        check_keys(m, "mc", {"paths", "seed", "x0", "y0", "n_steps", "policy"});
        cfg.mc.paths = m.value("paths", cfg.mc.paths);
        cfg.mc.seed = m.value("seed", cfg.mc.seed);
        cfg.mc.x0 = m.value("x0", cfg.mc.x0);
        cfg.mc.y0 = m.value("y0", cfg.mc.y0);
        cfg.mc.n_steps = m.value("n_steps", cfg.mc.n_steps);
        cfg.mc.policy = m.value("policy", cfg.mc.policy);
        if (cfg.mc.policy != "feedback" && cfg.mc.policy != "twap" && cfg.mc.policy != "uhat")
            fail("mc.policy", "expected feedback, twap, or uhat");
        if (cfg.mc.n_steps <= 0) fail("mc.n_steps", "must be positive");
    }
    if (j.contains("verify")) {
        const json& v = j.at("verify");
        check_keys(v, "verify", {"suites", "break_upwinding"});
        if (v.contains("suites"))
            cfg.verify.suites = v.at("suites").get<std::vector<std::string>>();
        cfg.verify.break_upwinding = v.value("break_upwinding", false);
    }
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    return cfg;
}

CoefficientField parse_coefficient_json(const std::string& json_text) {
    return parse_coefficient(json::parse(json_text), "<inline>");
}

}  // namespace shjb
