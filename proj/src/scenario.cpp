#include "vexp/scenario.hpp"

#include "vexp/audit.hpp"
#include "vexp/discrete_operator.hpp"
#include "vexp/energy.hpp"
#include "vexp/exponent.hpp"
#include "vexp/grid_function.hpp"
#include "vexp/modular.hpp"
#include "vexp/mountain_pass.hpp"
#include "vexp/potential.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace vexp {

using nlohmann::json;

const char* to_string(Command c) noexcept
{
    switch (c) {
    case Command::norms:
        return "norms";
    case Command::audit:
        return "audit";
    case Command::lambda_star:
        return "lambda-star";
    case Command::solve:
        return "solve";
    }
    return "solve";
}

const char* to_string(Mode m) noexcept
{
    switch (m) {
    case Mode::hj1:
        return "hj1";
    case Mode::hj2:
        return "hj2";
    case Mode::automatic:
        return "auto";
    }
    return "auto";
}

Command parse_command(std::string_view name)
{
    for (auto c : {Command::norms, Command::audit, Command::lambda_star, Command::solve}) {
        if (name == to_string(c)) {
            return c;
        }
    }
    throw ConfigError("unknown command '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- parsing

namespace {

/// Walks one JSON object, remembering which keys were read.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path))
    {
        if (!node_.is_object()) {
            throw ConfigError(where() + ": expected an object");
        }
    }

    [[nodiscard]] bool has(const char* key) const { return node_.contains(key); }

    template <class T>
    void read(const char* key, T& out)
    {
        if (!node_.contains(key)) {
            return;
        }
        seen_.insert(key);
        try {
            out = node_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(field(key) + ": wrong type");
        }
    }

    template <class T>
    void read(const char* key, std::optional<T>& out)
    {
        if (node_.contains(key)) {
            T v{};
            read(key, v);
            out = v;
        }
    }

    Section child(const char* key)
    {
        seen_.insert(key);
        return Section(node_.at(key), field(key));
    }

    const json& raw(const char* key)
    {
        seen_.insert(key);
        return node_.at(key);
    }

    /// Rejects keys that were never read.
    void finish() const
    {
        for (const auto& item : node_.items()) {
            if (!seen_.count(item.key())) {
                throw ConfigError(field(item.key().c_str()) + ": unknown key");
            }
        }
    }

    [[nodiscard]] std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    [[nodiscard]] std::string where() const { return path_.empty() ? "<root>" : path_; }

    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

void positive(bool ok, const std::string& field, const char* what)
{
    if (!ok) {
        throw ConfigError(field + ": " + what);
    }
}

GridSpec parse_grid(Section s)
{
    GridSpec g;
    s.read("dimension", g.dimension);
    positive(g.dimension == 1 || g.dimension == 2, s.field("dimension"), "must be 1 or 2");
    const auto d = static_cast<std::size_t>(g.dimension);
    if (s.has("nodes")) {
        const json& n = s.raw("nodes");
        try {
            g.nodes = n.is_array() ? n.get<std::vector<std::size_t>>() : std::vector<std::size_t>(d, n.get<std::size_t>());
        } catch (const json::exception&) {
            throw ConfigError(s.field("nodes") + ": expected a count or a list of counts");
        }
    } else {
        g.nodes.assign(d, g.dimension == 1 ? 129 : 33);
    }
    positive(g.nodes.size() == d, s.field("nodes"), "needs one count per axis");
    if (s.has("bounds")) {
        const json& b = s.raw("bounds");
        try {
            if (b.is_array() && b.size() == 2 && b[0].is_number()) {
                g.bounds.assign(d, {b[0].get<double>(), b[1].get<double>()});
            } else {
                g.bounds = b.get<std::vector<std::pair<double, double>>>();
            }
        } catch (const json::exception&) {
            throw ConfigError(s.field("bounds") + ": expected [lo, hi] or a list of [lo, hi]");
        }
    } else {
        g.bounds.assign(d, {0.0, 1.0});
    }
    positive(g.bounds.size() == d, s.field("bounds"), "needs one interval per axis");
    s.finish();
    return g;
}

} // namespace

ScenarioConfig parse_config(std::string_view text)
{
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("syntax error: ") + e.what());
    }
    ScenarioConfig c;
    Section s(root, "");
    if (s.has("grid")) {
        c.grid = parse_grid(s.child("grid"));
    }
    s.read("exponent", c.exponent);
    s.read("lambda", c.lambda);
    positive(std::isfinite(c.lambda), "lambda", "must be finite");
    s.read("function", c.function);
    if (s.has("mode")) {
        std::string m;
        s.read("mode", m);
        if (m == "hj1") {
            c.mode = Mode::hj1;
        } else if (m == "hj2") {
            c.mode = Mode::hj2;
        } else if (m == "auto") {
            c.mode = Mode::automatic;
        } else {
            throw ConfigError("mode: expected hj1, hj2 or auto");
        }
    }
    if (s.has("potential")) {
        Section p = s.child("potential");
        p.read("preset", c.potential.preset);
        p.read("mu", c.potential.mu);
        p.read("sigma", c.potential.sigma);
        p.read("q_plus", c.potential.q_plus);
        p.read("coef", c.potential.coef);
        p.read("nu", c.potential.nu);
        p.finish();
    }
    if (s.has("solver")) {
        Section v = s.child("solver");
        SolverSpec& o = c.solver;
        v.read("path_nodes", o.path_nodes);
        v.read("max_iters", o.max_iters);
        v.read("tol", o.tol);
        v.read("certify_tol", o.certify_tol);
        v.read("polish_every", o.polish_every);
        v.read("redistribute_every", o.redistribute_every);
        v.read("restarts", o.restarts);
        v.read("lambda_star_max_iters", o.lambda_star_max_iters);
        v.read("seed", o.seed);
        v.read("rho_grid", o.rho_grid);
        v.read("samples_per_sphere", o.samples_per_sphere);
        v.finish();
        positive(o.path_nodes >= 3, v.field("path_nodes"), "must be at least 3");
        positive(o.max_iters >= 1, v.field("max_iters"), "must be positive");
        positive(o.tol > 0.0 && o.certify_tol > 0.0, v.field("tol"), "tolerances must be positive");
        positive(o.restarts >= 1, v.field("restarts"), "must be at least 1");
        positive(o.redistribute_every >= 1, v.field("redistribute_every"), "must be positive");
        positive(o.polish_every >= 0, v.field("polish_every"), "must be non-negative");
        positive(o.samples_per_sphere >= 1, v.field("samples_per_sphere"), "must be positive");
        positive(!o.rho_grid.empty(), v.field("rho_grid"), "must not be empty");
    }
    if (s.has("audit")) {
        Section a = s.child("audit");
        a.read("nu", c.audit.nu);
        a.read("M", c.audit.M);
        a.read("tang_c", c.audit.tang_c);
        a.read("mu_claim", c.audit.mu_claim);
        a.read("t_max", c.audit.t_max);
        a.read("dimension", c.audit.dimension);
        a.finish();
        positive(c.audit.M > 0.0, a.field("M"), "must be positive");
        positive(c.audit.tang_c > 0.0, a.field("tang_c"), "must be positive");
        positive(c.audit.t_max > 1.0, a.field("t_max"), "must exceed 1");
    }
    if (s.has("far_point")) {
        Section f = s.child("far_point");
        f.read("profile", c.far_point.profile);
        f.read("t_max", c.far_point.t_max);
        f.read("u_bar", c.far_point.u_bar);
        f.finish();
        positive(c.far_point.t_max >= 1.0, f.field("t_max"), "must be at least 1");
    }
    if (s.has("output")) {
        Section o = s.child("output");
        o.read("dir", c.output_dir);
        o.finish();
    }
    s.finish();
    return c;
}

// ---------------------------------------------------------------- running

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const HypothesisAudit& a)
{
    json params = json::object();
    for (const auto& [k, v] : a.parameters) {
        params[k] = number(v);
    }
    json witnesses = json::array();
    for (const Witness& w : a.witnesses) {
        witnesses.push_back({{"p", number(w.p)},
                             {"t", number(w.t)},
                             {"measured", number(w.measured)},
                             {"bound", number(w.bound)},
                             {"what", w.what}});
    }
    return {{"id", a.id}, {"verdict", to_string(a.verdict)}, {"parameters", params}, {"witnesses", witnesses}, {"notes", a.notes}};
}

json to_json(const ValidityReport& v)
{
    return {{"admissible", v.admissible},
            {"solver_usable", v.solver_usable},
            {"p_minus", v.p_minus},
            {"p_plus", v.p_plus},
            {"p_hat_star", number(v.p_hat_star)},
            {"tilde_p", number(v.tilde_p)},
            {"violated_clauses", v.violated_clauses}};
}

PiecewisePotential build_potential(const PotentialSpec& s, const ExponentField& p)
{
    if (s.preset == "j1") {
        return make_j1(s.mu, s.sigma, p, s.q_plus);
    }
    if (s.preset == "j2") {
        return make_j2(s.mu, p, s.q_plus);
    }
    if (s.preset == "quartic") {
        return make_quartic(s.mu);
    }
    if (s.preset == "zero") {
        return make_zero();
    }
    if (s.preset == "power") {
        return make_power(s.coef, s.nu);
    }
    if (s.preset == "exponent_power") {
        return make_exponent_power(s.coef);
    }
    throw ConfigError("potential.preset: unknown preset '" + s.preset + "'");
}

struct Setup {
    GridPtr grid;
    ExponentField p;
    PiecewisePotential j;
    int dimension;
};

Setup build(const ScenarioConfig& c)
{
    GridPtr grid = build_grid(c.grid.dimension, c.grid.bounds, c.grid.nodes);
    ExponentField p = exponent_from_preset(grid, c.exponent);
    PiecewisePotential j = build_potential(c.potential, p);
    return {grid, std::move(p), std::move(j), c.audit.dimension.value_or(c.grid.dimension)};
}

HypothesisAudit placeholder(const char* id, const std::string& note)
{
    HypothesisAudit a;
    a.id = id;
    a.verdict = Verdict::inconclusive;
    a.notes.push_back(note);
    return a;
}

bool all_passed(const std::vector<HypothesisAudit>& v)
{
    return std::all_of(v.begin(), v.end(), [](const HypothesisAudit& a) { return a.passed(); });
}

struct AuditRun {
    std::vector<HypothesisAudit> base;
    std::vector<HypothesisAudit> h1;
    std::vector<HypothesisAudit> h2;
    [[nodiscard]] bool base_ok() const { return all_passed(base); }
    [[nodiscard]] bool h1_ok() const { return all_passed(h1); }
    [[nodiscard]] bool h2_ok() const { return all_passed(h2); }
};

AuditRun run_audits(const ScenarioConfig& c, const Setup& s)
{
    AuditSampling sampling = sampling_for(s.p, s.dimension);
    sampling.t_max = c.audit.t_max;
    AuditRun run;
    if (s.j.growth()) {
        run.base.push_back(audit_growth(s.j, sampling));
    } else {
        run.base.push_back(placeholder(hypothesis::growth, "potential declares no growth bound"));
    }
    const std::optional<double> mu = c.audit.mu_claim ? c.audit.mu_claim : s.j.local_mu();
    if (mu && *mu > 0.0) {
        run.base.push_back(audit_local_negativity(s.j, *mu, sampling));
    } else {
        run.base.push_back(placeholder(hypothesis::local_negativity, "no positive mu claim available"));
    }

    run.h1.push_back(audit_tang_condition(s.j, c.audit.tang_c, sampling));
    if (c.far_point.u_bar) {
        const GridFunction u_bar = function_from_preset(s.grid, *c.far_point.u_bar);
        run.h1.push_back(audit_far_point(s.j, u_bar, c.lambda, s.p));
    } else {
        run.h1.push_back(placeholder(hypothesis::far_point, "no far point configured (far_point.u_bar)"));
    }

    double nu = s.p.p_plus() + 1.0;
    if (c.audit.nu) {
        nu = *c.audit.nu;
    } else if (s.j.growth()) {
        for (double v : s.p.values()) {
            nu = std::max(nu, s.j.growth()->r(Site{v}));
        }
    }
    for (auto& a : audit_superlinear(s.j, nu, c.audit.M, sampling)) {
        run.h2.push_back(std::move(a));
    }
    return run;
}

json audits_json(const AuditRun& run, const char* resolved)
{
    json list = json::array();
    for (const auto* family : {&run.base, &run.h1, &run.h2}) {
        for (const HypothesisAudit& a : *family) {
            list.push_back(to_json(a));
        }
    }
    return {{"audits", list},
            {"families", {{"Hj", run.base_ok()}, {"Hj1", run.h1_ok()}, {"Hj2", run.h2_ok()}}},
            {"resolved_mode", resolved}};
}

/// Picks the pipeline; nullptr when the requested hypotheses fail.
const char* resolve_mode(Mode requested, const AuditRun& run, std::string& reason)
{
    if (!run.base_ok()) {
        reason = "Hj audits fail";
        return nullptr;
    }
    switch (requested) {
    case Mode::hj1:
        if (!run.h1_ok()) {
            reason = "Hj1 audits fail";
            return nullptr;
        }
        return "hj1";
    case Mode::hj2:
        if (!run.h2_ok()) {
            reason = "Hj2 audits fail";
            return nullptr;
        }
        return "hj2";
    case Mode::automatic:
        if (run.h1_ok() == run.h2_ok()) {
            reason = run.h1_ok() ? "both hypothesis families pass; mode is ambiguous" : "neither hypothesis family passes";
            return nullptr;
        }
        return run.h1_ok() ? "hj1" : "hj2";
    }
    return nullptr;
}

json grid_json(const GridSpec& g)
{
    return {{"dimension", g.dimension}, {"bounds", g.bounds}, {"nodes", g.nodes}};
}

json header(const ScenarioConfig& c, Command cmd)
{
    return {{"schema_version", schema_version},
            {"command", to_string(cmd)},
            {"grid", grid_json(c.grid)},
            {"exponent", c.exponent},
            {"seed", c.solver.seed}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string solution_csv(const GridFunction& u)
{
    const Grid& g = *u.grid();
    std::ostringstream os;
    os << (g.dimension() == 1 ? "x,u\n" : "x,y,u\n");
    for (std::size_t k = 0; k < u.size(); ++k) {
        os << format_double(g.coordinate(k, 0)) << ',';
        if (g.dimension() == 2) {
            os << format_double(g.coordinate(k, 1)) << ',';
        }
        os << format_double(u[k]) << '\n';
    }
    return os.str();
}

struct Thresholds {
    double lambda_star = 0.0;
    double tilde_p = 0.0;
    json j;
};

Thresholds thresholds(const ScenarioConfig& c, const ExponentField& p)
{
    LambdaStarOptions o;
    o.restarts = c.solver.restarts;
    o.seed = c.solver.seed;
    o.max_iters = c.solver.lambda_star_max_iters;
    const LambdaStarEstimate est = estimate_lambda_star(p, o);
    Thresholds t;
    t.lambda_star = est.value;
    t.tilde_p = tilde_p(p);
    t.j = {{"lambda_star", est.value},
           {"lambda_star_converged", est.converged},
           {"tilde_p", t.tilde_p},
           {"lambda_threshold_H1", t.tilde_p * est.value},
           {"lambda_threshold_geometry", p.p_minus() / p.p_plus() * est.value},
           {"per_start", est.per_start},
           {"iterations", est.iterations}};
    return t;
}

ScenarioOutcome run_norms(const ScenarioConfig& c)
{
    const GridPtr grid = build_grid(c.grid.dimension, c.grid.bounds, c.grid.nodes);
    const ExponentField p = exponent_from_preset(grid, c.exponent);
    const GridFunction u = function_from_preset(grid, c.function);
    const NormBundle n = norm_bundle(u, p);
    json out = header(c, Command::norms);
    out["function"] = c.function;
    out["modular"] = n.modular;
    out["luxemburg"] = n.luxemburg;
    out["phi"] = n.phi;
    out["sobolev"] = n.sobolev;
    out["phi_luxemburg"] = phi_luxemburg_norm(u, p);
    out["gradient_luxemburg"] = gradient_luxemburg_norm(u, p);
    out["validity"] = to_json(validate_exponents(p, c.audit.dimension.value_or(c.grid.dimension)));
    return {0, dump(out), ""};
}

ScenarioOutcome run_lambda_star(const ScenarioConfig& c)
{
    const GridPtr grid = build_grid(c.grid.dimension, c.grid.bounds, c.grid.nodes);
    const ExponentField p = exponent_from_preset(grid, c.exponent);
    json out = header(c, Command::lambda_star);
    try {
        const Thresholds t = thresholds(c, p);
        out.update(t.j);
        return {0, dump(out), ""};
    } catch (const NonConvergence& e) {
        out["error"] = e.what();
        out["lambda_star_best"] = e.best_so_far();
        return {3, dump(out), ""};
    }
}

ScenarioOutcome run_audit(const ScenarioConfig& c)
{
    const Setup s = build(c);
    const AuditRun run = run_audits(c, s);
    std::string reason;
    const char* mode = resolve_mode(c.mode, run, reason);
    json out = header(c, Command::audit);
    out["potential"] = c.potential.preset;
    out["requested_mode"] = to_string(c.mode);
    out.update(audits_json(run, mode ? mode : "none"));
    if (!mode) {
        out["error"] = reason;
    }
    return {mode ? 0 : 2, dump(out), ""};
}

ScenarioOutcome run_solve(const ScenarioConfig& c)
{
    const Setup s = build(c);
    const EnergyModel model(s.p, c.lambda, s.j);
    json out = header(c, Command::solve);
    out["potential"] = c.potential.preset;
    out["lambda"] = c.lambda;
    out["requested_mode"] = to_string(c.mode);

    json warnings = json::array();
    const ValidityReport validity = validate_exponents(s.p, s.dimension);
    out["validity"] = to_json(validity);
    if (!validity.admissible) {
        warnings.push_back("exponent violates the admissibility condition for N = " + std::to_string(s.dimension)
                           + "; running as a numerical experiment");
    }

    Thresholds t;
    try {
        t = thresholds(c, s.p);
    } catch (const NonConvergence& e) {
        out["error"] = std::string("lambda_star: ") + e.what();
        out["warnings"] = warnings;
        return {3, dump(out), ""};
    }
    out["thresholds"] = t.j;
    if (c.lambda >= t.tilde_p * t.lambda_star) {
        warnings.push_back("lambda is not below tilde_p * lambda_star");
    }
    if (c.lambda >= s.p.p_minus() / s.p.p_plus() * t.lambda_star) {
        warnings.push_back("lambda is not below (p-/p+) * lambda_star");
    }

    const AuditRun run = run_audits(c, s);
    std::string reason;
    const char* mode = resolve_mode(c.mode, run, reason);
    out.update(audits_json(run, mode ? mode : "none"));
    if (!mode) {
        out["error"] = reason;
        out["warnings"] = warnings;
        return {2, dump(out), ""};
    }

    GeometryOptions go;
    go.rho_grid = c.solver.rho_grid;
    go.samples_per_sphere = c.solver.samples_per_sphere;
    go.seed = c.solver.seed;
    GeometryCertificate geometry;
    GridFunction u_bar = GridFunction::zeros(s.grid);
    try {
        geometry = verify_geometry(model, go);
        if (std::string(mode) == "hj1") {
            u_bar = far_point_from_audit(model, function_from_preset(s.grid, c.far_point.u_bar.value()));
        } else {
            u_bar = find_far_point(model, function_from_preset(s.grid, c.far_point.profile), geometry.rho, c.far_point.t_max);
        }
        attach_far_point(geometry, model, u_bar);
    } catch (const AuditFailure& e) {
        out["error"] = e.what();
        out["failed_audit"] = to_json(e.audit());
        out["warnings"] = warnings;
        return {2, dump(out), ""};
    } catch (const GeometryNotFound& e) {
        out["error"] = e.what();
        out["warnings"] = warnings;
        return {3, dump(out), ""};
    } catch (const FarPointNotFound& e) {
        out["error"] = e.what();
        out["warnings"] = warnings;
        return {3, dump(out), ""};
    }

    MinimaxOptions mo;
    mo.path_nodes = c.solver.path_nodes;
    mo.max_iters = c.solver.max_iters;
    mo.tol = c.solver.tol;
    mo.certify_tol = c.solver.certify_tol;
    mo.polish_every = c.solver.polish_every;
    mo.redistribute_every = c.solver.redistribute_every;
    const MountainPassResult r = minimax_solve(model, u_bar, geometry, mo);
    const Certification cert = certify_solution(model, r.u_candidate, c.solver.certify_tol);

    json ps = nullptr;
    if (r.iterates.size() >= 2) {
        const PsReport p = ps_diagnostics(model, r.iterates);
        ps = {{"R_bounded", p.R_bounded}, {"m_vanishing", p.m_vanishing}, {"norm_unbounded", p.norm_unbounded},
              {"cauchy_tail", p.cauchy_tail}};
    }
    out["mode"] = mode;
    out["converged"] = r.converged;
    out["status"] = r.status;
    out["c_estimate"] = r.c_estimate;
    out["m_estimate"] = r.m_estimate;
    out["max_gap"] = r.max_gap;
    out["R_candidate"] = eval_R(model, r.u_candidate);
    out["candidate_norm"] = sobolev_norm(r.u_candidate, s.p);
    out["rho"] = r.geometry.rho;
    out["eta"] = r.geometry.eta;
    out["R_far"] = r.geometry.R_far;
    out["geometry_valid"] = r.geometry.valid;
    out["samples_used"] = r.geometry.samples_used;
    out["iterations"] = r.iterations;
    out["polished"] = r.polished;
    out["path_history"] = r.path_history;
    out["certification"] = {{"pass", cert.pass},
                            {"trivial", cert.trivial},
                            {"boundary_zero", cert.boundary_zero},
                            {"max_gap", cert.report.max_gap},
                            {"selection", to_string(SelectionRule::nearest_to_residual)}};
    out["ps_diagnostics"] = ps;
    out["warnings"] = warnings;
    const bool ok = r.converged && cert.pass;
    return {ok ? 0 : 3, dump(out), solution_csv(r.u_candidate)};
}

} // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& config, Command command)
{
    switch (command) {
    case Command::norms:
        return run_norms(config);
    case Command::audit:
        return run_audit(config);
    case Command::lambda_star:
        return run_lambda_star(config);
    case Command::solve:
        return run_solve(config);
    }
    throw ConfigError("unknown command");
}

void write_outputs(const ScenarioOutcome& outcome, Command command, const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create output directory '" + dir + "': " + ec.message());
    }
    const auto write = [&](const std::string& name, const std::string& text) {
        const std::filesystem::path path = std::filesystem::path(dir) / name;
        std::ofstream f(path, std::ios::binary);
        f << text;
        if (!f) {
            throw Error("cannot write '" + path.string() + "'");
        }
    };
    write(std::string(to_string(command)) + ".json", outcome.summary);
    if (!outcome.csv.empty()) {
        write("solution.csv", outcome.csv);
    }
}

} // namespace vexp
