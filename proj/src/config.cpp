#include "hamhom/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "hamhom/corpus.hpp"
#include "hamhom/errors.hpp"

namespace hamhom {
namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

const char* type_name(const ordered_json& j) {
    switch (j.type()) {
        case ordered_json::value_t::null: return "null";
        case ordered_json::value_t::object: return "an object";
        case ordered_json::value_t::array: return "an array";
        case ordered_json::value_t::string: return "a string";
        case ordered_json::value_t::boolean: return "a boolean";
        case ordered_json::value_t::number_integer:
        case ordered_json::value_t::number_unsigned:
        case ordered_json::value_t::number_float: return "a number";
        default: return "an unsupported value";
    }
}

// Strict object view: every key must be consumed by a getter, and finish()
// rejects leftovers. This is what makes typos fail loudly instead of being
// silently ignored.
class Reader {
public:
    Reader(const ordered_json& j, std::string ctx) : j_(j), ctx_(std::move(ctx)) {
        if (!j_.is_object()) fail(ctx_ + " must be an object, got " + type_name(j_));
    }

    const std::string& ctx() const { return ctx_; }

    bool has(const std::string& key) const { return j_.contains(key); }

    const ordered_json* find(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const ordered_json& require(const std::string& key) {
        const ordered_json* v = find(key);
        if (!v) fail(ctx_ + " is missing required key \"" + key + "\"");
        return *v;
    }

    double get_double(const std::string& key) { return as_double(require(key), key); }

    double get_double_or(const std::string& key, double fallback) {
        const ordered_json* v = find(key);
        return v ? as_double(*v, key) : fallback;
    }

    int get_int(const std::string& key) { return as_int(require(key), key); }

    int get_int_or(const std::string& key, int fallback) {
        const ordered_json* v = find(key);
        return v ? as_int(*v, key) : fallback;
    }

    long get_long_or(const std::string& key, long fallback) {
        const ordered_json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) fail(path(key) + " must be an integer");
        return v->get<long>();
    }

    bool get_bool_or(const std::string& key, bool fallback) {
        const ordered_json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) fail(path(key) + " must be a boolean");
        return v->get<bool>();
    }

    std::string get_string(const std::string& key) {
        const ordered_json& v = require(key);
        if (!v.is_string()) fail(path(key) + " must be a string");
        return v.get<std::string>();
    }

    std::string get_string_or(const std::string& key, std::string fallback) {
        const ordered_json* v = find(key);
        if (!v) return fallback;
        if (!v->is_string()) fail(path(key) + " must be a string");
        return v->get<std::string>();
    }

    std::vector<double> get_double_array(const std::string& key) {
        return as_double_array(require(key), key);
    }

    std::vector<double> get_double_array_or(const std::string& key) {
        const ordered_json* v = find(key);
        return v ? as_double_array(*v, key) : std::vector<double>{};
    }

    std::vector<int> get_int_array(const std::string& key) {
        const ordered_json& v = require(key);
        if (!v.is_array()) fail(path(key) + " must be an array of integers");
        std::vector<int> out;
        out.reserve(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(as_int(v[i], key + "[" + std::to_string(i) + "]"));
        return out;
    }

    std::string path(const std::string& key) const { return ctx_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.contains(it.key()))
                fail("unexpected key \"" + it.key() + "\" in " + ctx_);
    }

private:
    double as_double(const ordered_json& v, const std::string& key) const {
        if (!v.is_number()) fail(path(key) + " must be a number, got " + type_name(v));
        double d = v.get<double>();
        if (!std::isfinite(d)) fail(path(key) + " must be finite");
        return d;
    }

    int as_int(const ordered_json& v, const std::string& key) const {
        if (!v.is_number_integer()) fail(path(key) + " must be an integer");
        std::int64_t n = v.get<std::int64_t>();
        if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max())
            fail(path(key) + " is out of range");
        return static_cast<int>(n);
    }

    std::vector<double> as_double_array(const ordered_json& v, const std::string& key) const {
        if (!v.is_array()) fail(path(key) + " must be an array of numbers");
        std::vector<double> out;
        out.reserve(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(as_double(v[i], key + "[" + std::to_string(i) + "]"));
        return out;
    }

    const ordered_json& j_;
    std::string ctx_;
    std::set<std::string> seen_;
};

CoeffMode decode_mode(const ordered_json& j, const std::string& ctx) {
    Reader r(j, ctx);
    CoeffMode m;
    if (const ordered_json* kx = r.find("kx")) {
        if (!kx->is_array() || kx->empty() || kx->size() > 2)
            fail(ctx + ".kx must be an array of one or two integers");
        for (std::size_t i = 0; i < kx->size(); ++i) {
            if (!(*kx)[i].is_number_integer()) fail(ctx + ".kx entries must be integers");
            m.kx[i] = (*kx)[i].get<int>();
        }
    }
    m.ky = r.get_int_or("ky", 0);
    m.kt = r.get_int_or("kt", 0);
    m.amplitude = r.get_double("amplitude");
    m.phase = r.get_double_or("phase", 0.0);
    r.finish();
    return m;
}

CoeffField decode_field(const ordered_json& j, const std::string& ctx) {
    if (j.is_number()) return CoeffField::constant(j.get<double>());
    Reader r(j, ctx);
    CoeffField f;
    f.mean = r.get_double_or("mean", 0.0);
    if (const ordered_json* modes = r.find("modes")) {
        if (!modes->is_array()) fail(ctx + ".modes must be an array");
        f.modes.reserve(modes->size());
        for (std::size_t i = 0; i < modes->size(); ++i)
            f.modes.push_back(decode_mode((*modes)[i], ctx + ".modes[" + std::to_string(i) + "]"));
    }
    r.finish();
    return f;
}

GraphSpec decode_graph(const ordered_json& j, const std::string& ctx) {
    Reader r(j, ctx);
    GraphSpec g;
    g.space_dims = r.get_int_or("space_dims", 1);
    g.c = decode_field(r.require("c"), ctx + ".c");
    g.g = decode_field(r.require("g"), ctx + ".g");
    r.finish();
    g.validate();
    return g;
}

HamiltonianSpec decode_hamiltonian(Reader& r) {
    HamiltonianSpec spec;
    spec.space_dims = r.get_int_or("space_dims", 1);
    spec.has_y = r.get_bool_or("has_y", false);

    {
        const ordered_json& c = r.require("coercive");
        Reader cr(c, r.ctx() + ".coercive");
        CoerciveTerm term;
        term.beta = cr.get_double_or("beta", 1.0);
        term.a = decode_field(cr.require("a"), cr.ctx() + ".a");
        cr.finish();
        spec.coercive.push_back(std::move(term));
    }

    if (const ordered_json* drifts = r.find("drifts")) {
        if (!drifts->is_array()) fail(r.path("drifts") + " must be an array");
        for (std::size_t i = 0; i < drifts->size(); ++i) {
            std::string ctx = r.path("drifts") + "[" + std::to_string(i) + "]";
            Reader dr((*drifts)[i], ctx);
            DriftTerm term;
            std::string shape = dr.get_string_or("shape", "absolute");
            if (shape == "absolute") term.shape = DriftShape::absolute;
            else if (shape == "linear") term.shape = DriftShape::linear;
            else fail(ctx + ".shape must be \"absolute\" or \"linear\"");
            term.offset = dr.get_double_or("offset", 0.0);
            term.b = decode_field(dr.require("b"), ctx + ".b");
            dr.finish();
            spec.drifts.push_back(std::move(term));
        }
    }

    if (const ordered_json* sources = r.find("sources")) {
        if (!sources->is_array()) fail(r.path("sources") + " must be an array");
        for (std::size_t i = 0; i < sources->size(); ++i) {
            std::string ctx = r.path("sources") + "[" + std::to_string(i) + "]";
            Reader sr((*sources)[i], ctx);
            SourceTerm term;
            term.f = decode_field(sr.require("f"), ctx + ".f");
            sr.finish();
            spec.sources.push_back(std::move(term));
        }
    }

    if (const ordered_json* sx = r.find("shift_x")) {
        if (!sx->is_array() || sx->empty() || sx->size() > 2)
            fail(r.path("shift_x") + " must be an array of one or two numbers");
        for (std::size_t i = 0; i < sx->size(); ++i) {
            if (!(*sx)[i].is_number()) fail(r.path("shift_x") + " entries must be numbers");
            spec.shift_x[i] = (*sx)[i].get<double>();
        }
    }
    spec.shift_y = r.get_double_or("shift_y", 0.0);
    return spec;
}

PGrid decode_p_axes(const ordered_json& j, const std::string& ctx) {
    if (!j.is_array()) fail(ctx + " must be an array of axis objects");
    PGrid grid;
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::string actx = ctx + "[" + std::to_string(i) + "]";
        Reader r(j[i], actx);
        PAxis axis;
        axis.min = r.get_double("min");
        axis.max = r.get_double_or("max", axis.min);
        axis.count = r.get_int_or("count", 1);
        r.finish();
        grid.axes.push_back(axis);
    }
    grid.validate();
    return grid;
}

void check_positive(std::span<const double> v, const std::string& ctx) {
    for (double a : v)
        if (!(a > 0.0)) fail("every entry of " + ctx + " must be positive");
}

SchemeConfig decode_scheme(const ordered_json& j) {
    Reader r(j, "scheme");
    SchemeConfig cfg;
    cfg.cfl = r.get_double_or("cfl", cfg.cfl);
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) fail("scheme.cfl must lie in (0, 1]");
    cfg.residual_tol = r.get_double_or("residual_tol", cfg.residual_tol);
    if (!(cfg.residual_tol > 0.0)) fail("scheme.residual_tol must be positive");
    cfg.max_steps = r.get_long_or("max_steps", cfg.max_steps);
    if (cfg.max_steps < 1) fail("scheme.max_steps must be at least 1");
    cfg.gradient_probe_radius = r.get_double_or("gradient_probe_radius", cfg.gradient_probe_radius);
    if (!(cfg.gradient_probe_radius > 0.0)) fail("scheme.gradient_probe_radius must be positive");
    if (r.has("dissipation")) {
        cfg.dissipation_per_axis = r.get_double_array("dissipation");
        check_positive(cfg.dissipation_per_axis, "scheme.dissipation");
    } else {
        r.find("dissipation");
    }
    r.finish();
    return cfg;
}

ProbeConfig decode_probe(Reader& r) {
    ProbeConfig probe;
    probe.p_max = r.get_double_or("p_max", probe.p_max);
    if (!(probe.p_max > 1.0)) fail(r.path("p_max") + " must exceed 1");
    probe.fd_step = r.get_double_or("fd_step", probe.fd_step);
    if (!(probe.fd_step > 0.0)) fail(r.path("fd_step") + " must be positive");
    probe.cells = r.get_int_or("cells", probe.cells);
    if (probe.cells < 2) fail(r.path("cells") + " must be at least 2");
    probe.time_samples = r.get_int_or("time_samples", probe.time_samples);
    if (probe.time_samples < 1) fail(r.path("time_samples") + " must be at least 1");
    probe.radial_samples = r.get_int_or("radial_samples", probe.radial_samples);
    if (probe.radial_samples < 2) fail(r.path("radial_samples") + " must be at least 2");
    probe.directions = r.get_int_or("directions", probe.directions);
    if (probe.directions < 1) fail(r.path("directions") + " must be at least 1");
    probe.ratio_cap = r.get_double_or("ratio_cap", probe.ratio_cap);
    if (!(probe.ratio_cap > 0.0)) fail(r.path("ratio_cap") + " must be positive");
    return probe;
}

std::vector<double> decode_alphas(Reader& r) {
    std::vector<double> alphas = r.get_double_array_or("alphas");
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0)) fail(r.path("alphas") + " entries must lie in (0, 1)");
    return alphas;
}

ExperimentParams decode_params(ExperimentKind kind, Reader& r) {
    switch (kind) {
        case ExperimentKind::verify: {
            VerifyParams p;
            p.probe = decode_probe(r);
            return p;
        }
        case ExperimentKind::ergodic: {
            ErgodicParams p;
            p.alphas = decode_alphas(r);
            p.longtime_T = r.get_double_or("longtime_T", p.longtime_T);
            if (!(p.longtime_T > 0.0)) fail(r.path("longtime_T") + " must be positive");
            return p;
        }
        case ExperimentKind::effective: {
            EffectiveParams p;
            p.p_grid = decode_p_axes(r.require("p_axes"), r.path("p_axes"));
            p.alphas = decode_alphas(r);
            p.longtime_T = r.get_double_or("longtime_T", p.longtime_T);
            if (!(p.longtime_T > 0.0)) fail(r.path("longtime_T") + " must be positive");
            p.crosscheck_tol = r.get_double_or("crosscheck_tol", p.crosscheck_tol);
            if (!(p.crosscheck_tol > 0.0)) fail(r.path("crosscheck_tol") + " must be positive");
            return p;
        }
        case ExperimentKind::homogenize: {
            HomogenizeParams p;
            if (r.has("epsilons")) {
                p.epsilons = r.get_double_array("epsilons");
                if (p.epsilons.empty()) fail(r.path("epsilons") + " must not be empty");
                for (double e : p.epsilons)
                    if (!(e > 0.0 && e <= 1.0)) fail(r.path("epsilons") + " entries must lie in (0, 1]");
            } else {
                r.find("epsilons");
            }
            p.horizon = r.get_double_or("horizon", p.horizon);
            if (!(p.horizon > 0.0)) fail(r.path("horizon") + " must be positive");
            p.initial = decode_field(r.require("initial"), r.path("initial"));
            if (const ordered_json* axes = r.find("p_axes"))
                p.p_grid = decode_p_axes(*axes, r.path("p_axes"));
            p.cells_per_fast_period = r.get_int_or("cells_per_fast_period", p.cells_per_fast_period);
            if (p.cells_per_fast_period < 4) fail(r.path("cells_per_fast_period") + " must be at least 4");
            p.alphas = decode_alphas(r);
            p.longtime_T = r.get_double_or("longtime_T", p.longtime_T);
            if (!(p.longtime_T > 0.0)) fail(r.path("longtime_T") + " must be positive");
            p.crosscheck_tol = r.get_double_or("crosscheck_tol", p.crosscheck_tol);
            if (!(p.crosscheck_tol > 0.0)) fail(r.path("crosscheck_tol") + " must be positive");
            return p;
        }
        case ExperimentKind::graph: {
            GraphParams p;
            const ordered_json& slopes = r.require("slopes");
            if (!slopes.is_array() || slopes.empty())
                fail(r.path("slopes") + " must be a non-empty array");
            for (std::size_t i = 0; i < slopes.size(); ++i) {
                std::string ctx = r.path("slopes") + "[" + std::to_string(i) + "]";
                Reader sr(slopes[i], ctx);
                RationalSlope s;
                s.num = sr.get_int("num");
                s.den = sr.get_int_or("den", 1);
                sr.finish();
                s.validate();
                p.slopes.push_back(s);
            }
            p.slope_T = r.get_double_or("slope_T", p.slope_T);
            if (!(p.slope_T > 0.0)) fail(r.path("slope_T") + " must be positive");
            p.cells_per_unit = r.get_int_or("cells_per_unit", p.cells_per_unit);
            if (p.cells_per_unit < 16) fail(r.path("cells_per_unit") + " must be at least 16");
            p.alphas = decode_alphas(r);
            p.longtime_T = r.get_double_or("longtime_T", p.longtime_T);
            if (!(p.longtime_T > 0.0)) fail(r.path("longtime_T") + " must be positive");
            p.crosscheck_tol = r.get_double_or("crosscheck_tol", p.crosscheck_tol);
            if (!(p.crosscheck_tol > 0.0)) fail(r.path("crosscheck_tol") + " must be positive");
            return p;
        }
    }
    fail("unreachable experiment kind");
}

OutputConfig decode_output(const ordered_json& j) {
    Reader r(j, "output");
    OutputConfig out;
    out.directory = r.get_string_or("directory", out.directory);
    if (out.directory.empty()) fail("output.directory must not be empty");
    if (const ordered_json* formats = r.find("formats")) {
        if (!formats->is_array() || formats->empty())
            fail("output.formats must be a non-empty array");
        out.json = out.csv = false;
        for (const auto& f : *formats) {
            if (!f.is_string()) fail("output.formats entries must be strings");
            std::string name = f.get<std::string>();
            if (name == "json") out.json = true;
            else if (name == "csv") out.csv = true;
            else fail("output.formats entries must be \"json\" or \"csv\", got \"" + name + "\"");
        }
    }
    r.finish();
    return out;
}

void apply_override(ordered_json& root, const std::string& entry) {
    std::size_t eq = entry.find('=');
    if (eq == std::string::npos || eq == 0)
        fail("override \"" + entry + "\" must have the form path.to.key=value");
    std::string path = entry.substr(0, eq);
    std::string text = entry.substr(eq + 1);

    ordered_json value;
    try {
        value = ordered_json::parse(text);
    } catch (const ordered_json::parse_error&) {
        value = text;  // bare words are string values
    }

    ordered_json* node = &root;
    std::size_t start = 0;
    while (true) {
        std::size_t dot = path.find('.', start);
        std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (key.empty()) fail("override path \"" + path + "\" has an empty segment");
        if (dot == std::string::npos) {
            (*node)[key] = std::move(value);
            return;
        }
        if (!node->is_object()) fail("override path \"" + path + "\" descends into a non-object");
        if (!node->contains(key)) (*node)[key] = ordered_json::object();
        node = &(*node)[key];
        if (!node->is_object()) fail("override path \"" + path + "\" descends into a non-object");
        start = dot + 1;
    }
}

} // namespace

std::string_view kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::verify: return "verify";
        case ExperimentKind::ergodic: return "ergodic";
        case ExperimentKind::effective: return "effective";
        case ExperimentKind::homogenize: return "homogenize";
        case ExperimentKind::graph: return "graph";
    }
    return "unknown";
}

HamiltonianSpec ExperimentConfig::hamiltonian() const {
    if (spec) return *spec;
    if (graph) return lift(*graph);
    throw ConfigError("config carries no spec to march");
}

TorusGrid ExperimentConfig::make_grid() const {
    if (grid_cells.empty())
        throw ConfigError("config: the \"" + std::string(kind_name(kind)) +
                          "\" experiment needs a grid section");
    HamiltonianSpec h = hamiltonian();
    int axes = h.space_dims + (h.has_y ? 1 : 0);
    if (static_cast<int>(grid_cells.size()) != axes)
        throw ConfigError("config: grid.cells lists " + std::to_string(grid_cells.size()) +
                          " axes but the spec marches " + std::to_string(axes));
    return TorusGrid(h.space_dims, h.has_y, grid_cells);
}

ExperimentConfig parse_config_text(const std::string& text,
                                   std::span<const std::string> overrides) {
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        fail(std::string("not valid JSON: ") + e.what());
    }
    for (const std::string& entry : overrides) apply_override(root, entry);

    ExperimentConfig cfg;
    Reader top(root, "config");

    {
        const ordered_json& spec = top.require("spec");
        Reader sr(spec, "spec");
        if (sr.has("corpus")) {
            std::string name = sr.get_string("corpus");
            sr.finish();
            const CorpusEntry& entry = corpus_entry(name);
            cfg.spec = entry.spec;
            cfg.graph = entry.graph;
        } else if (sr.has("graph")) {
            cfg.graph = decode_graph(sr.require("graph"), "spec.graph");
            sr.finish();
        } else {
            HamiltonianSpec h = decode_hamiltonian(sr);
            sr.finish();
            h.validate();
            cfg.spec = std::move(h);
        }
    }

    if (const ordered_json* grid = top.find("grid")) {
        Reader gr(*grid, "grid");
        cfg.grid_cells = gr.get_int_array("cells");
        gr.finish();
        if (cfg.grid_cells.empty()) fail("grid.cells must not be empty");
        for (int c : cfg.grid_cells)
            if (c < 2) fail("grid.cells entries must be at least 2");
    }

    if (const ordered_json* scheme = top.find("scheme")) cfg.scheme = decode_scheme(*scheme);

    {
        const ordered_json& exp = top.require("experiment");
        Reader er(exp, "experiment");
        std::string kind = er.get_string("kind");
        if (kind == "verify") cfg.kind = ExperimentKind::verify;
        else if (kind == "ergodic") cfg.kind = ExperimentKind::ergodic;
        else if (kind == "effective") cfg.kind = ExperimentKind::effective;
        else if (kind == "homogenize") cfg.kind = ExperimentKind::homogenize;
        else if (kind == "graph") cfg.kind = ExperimentKind::graph;
        else
            fail("experiment.kind must be one of verify, ergodic, effective, homogenize, "
                 "graph; got \"" + kind + "\"");
        cfg.params = decode_params(cfg.kind, er);
        er.finish();
    }

    if (const ordered_json* output = top.find("output")) cfg.output = decode_output(*output);

    top.finish();

    if (cfg.kind == ExperimentKind::graph && !cfg.graph)
        fail("the graph experiment needs a front-speed spec (spec.graph or a graph corpus entry)");
    if (cfg.kind != ExperimentKind::verify && cfg.grid_cells.empty())
        fail("the " + std::string(kind_name(cfg.kind)) + " experiment needs a grid section");
    if (!cfg.grid_cells.empty()) (void)cfg.make_grid();  // axis-count check up front
    if (!cfg.scheme.dissipation_per_axis.empty() && !cfg.grid_cells.empty() &&
        cfg.scheme.dissipation_per_axis.size() != cfg.grid_cells.size())
        fail("scheme.dissipation lists " + std::to_string(cfg.scheme.dissipation_per_axis.size()) +
             " axes but grid.cells lists " + std::to_string(cfg.grid_cells.size()));

    cfg.resolved = root.dump(2);
    cfg.resolved.push_back('\n');
    return cfg;
}

ExperimentConfig load_config(const std::string& path, std::span<const std::string> overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot read \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), overrides);
}

} // namespace hamhom
