#include "gentensor/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <random>

namespace gentensor {

namespace {

// ---- path-aware config access ----

[[noreturn]] void cfg_fail(const std::string& path, const std::string& msg) {
    throw ConfigError("config error at " + path + ": " + msg);
}

const Json& need(const Json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) cfg_fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) cfg_fail(path + "." + key, "missing required field");
    return *it;
}

double num_at(const Json& j, const std::string& path) {
    if (!j.is_number()) cfg_fail(path, "expected a number");
    return j.get<double>();
}

int int_at(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) cfg_fail(path, "expected an integer");
    return j.get<int>();
}

std::string str_at(const Json& j, const std::string& path) {
    if (!j.is_string()) cfg_fail(path, "expected a string");
    return j.get<std::string>();
}

Vec vec_at(const Json& j, const std::string& path) {
    if (!j.is_array()) cfg_fail(path, "expected an array of numbers");
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v[i] = num_at(j[i], path);
    return v;
}

Box box_at(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) cfg_fail(path, "expected [[lo,hi],...]");
    Vec lo(j.size()), hi(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != 2)
            cfg_fail(path, "each axis needs [lo,hi]");
        lo[i] = num_at(j[i][0], path);
        hi[i] = num_at(j[i][1], path);
    }
    return Box(lo, hi);
}

std::vector<std::string> strings_at(const Json& j, const std::string& path) {
    if (!j.is_array()) cfg_fail(path, "expected an array of strings");
    std::vector<std::string> out;
    for (size_t i = 0; i < j.size(); ++i) out.push_back(str_at(j[i], path));
    return out;
}

// ---- resolved objects ----

struct ObjectStore {
    ChartDomain domain;
    std::map<std::string, TensorField> fields;
    std::map<std::string, RiemannianMetric> metrics;
    std::map<std::string, ProfilePtr> profiles;
    std::map<std::string, SmoothingKernel> kernels;
    std::map<std::string, TransportOperator> transports;
    std::map<std::string, NForm> nforms;
    std::map<std::string, DistPtr> distributions;
    std::map<std::string, Diffeomorphism> diffeos;

    template <class M>
    const typename M::mapped_type& lookup(const M& m, const std::string& name,
                                          const std::string& what) const {
        auto it = m.find(name);
        if (it == m.end()) cfg_fail("objects", "unknown " + what + " '" + name + "'");
        return it->second;
    }
    const TensorField& field(const std::string& n) const {
        return lookup(fields, n, "field");
    }
    const DistPtr& dist(const std::string& n) const {
        return lookup(distributions, n, "distribution");
    }
};

TensorField field_from_json(const ChartDomain& dom, const Json& j,
                            const std::string& path) {
    const int r = j.contains("r") ? int_at(j["r"], path + ".r") : 0;
    const int s = j.contains("s") ? int_at(j["s"], path + ".s") : 0;
    auto comps = strings_at(need(j, "components", path), path + ".components");
    try {
        return TensorField::from_exprs(dom, r, s, comps);
    } catch (const Error& e) {
        cfg_fail(path, e.what());
    }
}

DistPtr distribution_from_json(const ObjectStore& store, const Json& j,
                               const std::string& path);

DistPtr distribution_from_json(const ObjectStore& store, const Json& j,
                               const std::string& path) {
    const std::string kind = str_at(need(j, "kind", path), path + ".kind");
    const ChartDomain& dom = store.domain;
    if (kind == "delta") {
        Vec pt = vec_at(need(j, "point", path), path + ".point");
        MultiIndex alpha(dom.dim);
        if (j.contains("derivative")) {
            Vec d = vec_at(j["derivative"], path + ".derivative");
            for (int i = 0; i < dom.dim; ++i) alpha[i] = static_cast<int>(d[i]);
        }
        return delta_distribution(dom, pt, alpha);
    }
    if (kind == "heaviside") {
        const int axis = j.contains("axis") ? int_at(j["axis"], path + ".axis") : 0;
        const double off =
            j.contains("offset") ? num_at(j["offset"], path + ".offset") : 0.0;
        return heaviside_distribution(dom, axis, off);
    }
    if (kind == "principal_value") return principal_value_distribution(dom);
    if (kind == "regular") {
        if (j.contains("field"))
            return regular_distribution(
                store.field(str_at(j["field"], path + ".field")));
        return regular_distribution(
            field_from_json(dom, j, path));
    }
    if (kind == "linear_combination") {
        const Json& terms = need(j, "terms", path);
        std::vector<std::pair<double, DistPtr>> out;
        for (size_t i = 0; i < terms.size(); ++i) {
            const auto tp = path + ".terms[" + std::to_string(i) + "]";
            if (!terms[i].is_array() || terms[i].size() != 2)
                cfg_fail(tp, "expected [coefficient, distribution]");
            DistPtr inner = terms[i][1].is_string()
                                ? store.dist(terms[i][1].get<std::string>())
                                : distribution_from_json(store, terms[i][1], tp);
            out.emplace_back(num_at(terms[i][0], tp), inner);
        }
        return linear_combination(std::move(out));
    }
    if (kind == "smooth_coeff_product") {
        const Json& cj = need(j, "coeff", path);
        TensorField f = cj.is_string() ? store.field(cj.get<std::string>())
                                       : field_from_json(dom, cj, path + ".coeff");
        const Json& ij = need(j, "inner", path);
        DistPtr inner = ij.is_string() ? store.dist(ij.get<std::string>())
                                       : distribution_from_json(store, ij, path + ".inner");
        return smooth_coeff_product(f, inner);
    }
    cfg_fail(path + ".kind", "unknown distribution kind '" + kind + "'");
}

RepPtr representative_from_json(const ObjectStore& store, const Json& j,
                                const std::string& path) {
    const std::string op = str_at(need(j, "op", path), path + ".op");
    if (op == "iota")
        return embed_distribution(
            store.dist(str_at(need(j, "arg", path), path + ".arg")));
    if (op == "sigma")
        return embed_smooth(store.field(str_at(need(j, "arg", path), path + ".arg")));
    if (op == "tensor") {
        const Json& args = need(j, "args", path);
        if (!args.is_array() || args.size() != 2) cfg_fail(path + ".args", "need two");
        return tensor_product(
            representative_from_json(store, args[0], path + ".args[0]"),
            representative_from_json(store, args[1], path + ".args[1]"));
    }
    if (op == "sum") {
        const Json& terms = need(j, "terms", path);
        std::vector<std::pair<double, RepPtr>> out;
        for (size_t i = 0; i < terms.size(); ++i) {
            const auto tp = path + ".terms[" + std::to_string(i) + "]";
            out.emplace_back(num_at(terms[i][0], tp),
                             representative_from_json(store, terms[i][1], tp));
        }
        return linear_combination(std::move(out));
    }
    if (op == "contract")
        return contract(representative_from_json(store, need(j, "arg", path), path),
                        int_at(need(j, "upper", path), path + ".upper"),
                        int_at(need(j, "lower", path), path + ".lower"));
    if (op == "lie")
        return hat_lie(store.field(str_at(need(j, "X", path), path + ".X")),
                       representative_from_json(store, need(j, "arg", path), path));
    if (op == "pullback")
        return hat_pullback(
            store.lookup(store.diffeos, str_at(need(j, "mu", path), path + ".mu"),
                         "diffeomorphism"),
            representative_from_json(store, need(j, "arg", path), path));
    if (op == "dual_pair")
        return dual_pair(representative_from_json(store, need(j, "arg", path), path),
                         store.field(str_at(need(j, "field", path), path + ".field")));
    if (op == "restrict")
        return restrict_representative(
            representative_from_json(store, need(j, "arg", path), path),
            box_at(need(j, "box", path), path + ".box"));
    cfg_fail(path + ".op", "unknown operation '" + op + "'");
}

ObjectStore build_objects(const Json& cfg) {
    ObjectStore store;
    const Json& dj = need(cfg, "domain", "$");
    store.domain = ChartDomain(int_at(need(dj, "dim", "$.domain"), "$.domain.dim"));
    if (dj.contains("bounds"))
        store.domain = ChartDomain(store.domain.dim,
                                   box_at(dj["bounds"], "$.domain.bounds"));
    if (!cfg.contains("objects")) return store;
    const Json& obj = cfg["objects"];

    if (obj.contains("fields"))
        for (auto& [name, fj] : obj["fields"].items())
            store.fields.emplace(name, field_from_json(store.domain, fj,
                                                       "$.objects.fields." + name));
    if (obj.contains("vector_fields"))
        for (auto& [name, fj] : obj["vector_fields"].items()) {
            auto comps = strings_at(need(fj, "components", "$.objects.vector_fields." + name),
                                    "$.objects.vector_fields." + name + ".components");
            store.fields.emplace(
                name, TensorField::from_exprs(store.domain, 1, 0, comps));
        }
    if (obj.contains("metrics"))
        for (auto& [name, mj] : obj["metrics"].items()) {
            const std::string path = "$.objects.metrics." + name;
            RiemannianMetric g =
                (mj.contains("type") && str_at(mj["type"], path) == "euclidean")
                    ? RiemannianMetric::euclidean(store.domain)
                    : RiemannianMetric::from_exprs(
                          store.domain, strings_at(need(mj, "entries", path),
                                                   path + ".entries"));
            if (mj.contains("injectivity_radius"))
                g.injectivity_radius = num_at(mj["injectivity_radius"], path);
            store.metrics.emplace(name, std::move(g));
        }
    if (obj.contains("profiles"))
        for (auto& [name, pj] : obj["profiles"].items()) {
            const std::string path = "$.objects.profiles." + name;
            const std::string type = str_at(need(pj, "type", path), path + ".type");
            if (type == "expr")
                store.profiles.emplace(name, MollifierProfile::from_expr(str_at(
                                                 need(pj, "expr", path), path + ".expr")));
            else
                store.profiles.emplace(name, profile_by_name(type));
        }
    if (obj.contains("kernels"))
        for (auto& [name, kj] : obj["kernels"].items()) {
            const std::string path = "$.objects.kernels." + name;
            ProfilePtr prof;
            if (kj.contains("profile")) {
                const std::string pn = str_at(kj["profile"], path + ".profile");
                auto it = store.profiles.find(pn);
                prof = it != store.profiles.end() ? it->second : profile_by_name(pn);
            } else {
                prof = MollifierProfile::bump();
            }
            const int m = kj.contains("order") ? int_at(kj["order"], path + ".order") : 0;
            const double C = kj.contains("support_constant")
                                 ? num_at(kj["support_constant"], path)
                                 : 1.0;
            store.kernels.emplace(name, build_kernel(store.domain, prof, m, C));
        }
    if (obj.contains("diffeomorphisms"))
        for (auto& [name, mj] : obj["diffeomorphisms"].items()) {
            const std::string path = "$.objects.diffeomorphisms." + name;
            auto fwd = strings_at(need(mj, "forward", path), path + ".forward");
            std::vector<std::string> inv;
            if (mj.contains("inverse")) inv = strings_at(mj["inverse"], path + ".inverse");
            store.diffeos.emplace(
                name, Diffeomorphism::from_exprs(store.domain, fwd, inv));
        }
    if (obj.contains("transports"))
        for (auto& [name, tj] : obj["transports"].items()) {
            const std::string path = "$.objects.transports." + name;
            const std::string type = str_at(need(tj, "type", path), path + ".type");
            if (type == "identity-cutoff") {
                Box plateau = box_at(need(tj, "plateau", path), path + ".plateau");
                const double w = tj.contains("transition")
                                     ? num_at(tj["transition"], path)
                                     : 0.25 * plateau.max_width();
                store.transports.emplace(
                    name, identity_cutoff_transport(store.domain, plateau, w));
            } else if (type == "geodesic") {
                Box plateau = box_at(need(tj, "plateau", path), path + ".plateau");
                const double w = tj.contains("transition")
                                     ? num_at(tj["transition"], path)
                                     : 0.25 * plateau.max_width();
                const auto& g = store.lookup(
                    store.metrics, str_at(need(tj, "metric", path), path + ".metric"),
                    "metric");
                const int n = store.domain.dim;
                ScalarFn chi = constant_fn(2 * n, 1.0);
                for (int i = 0; i < n; ++i) {
                    const double c = plateau.center()[i];
                    const double a = 0.5 * plateau.widths()[i];
                    chi = product_fn(chi, axis_plateau_fn(2 * n, i, c, a, w));
                    chi = product_fn(chi, axis_plateau_fn(2 * n, n + i, c, a, w));
                }
                Box supp1 = plateau.inflated(w);
                store.transports.emplace(
                    name, build_geodesic_transport(g, chi, supp1.product(supp1),
                                                   plateau, plateau));
            } else if (type == "expr") {
                TransportOperator A;
                A.domain = store.domain;
                A.support = box_at(need(tj, "support", path), path + ".support");
                if (tj.contains("core"))
                    A.core_region = box_at(tj["core"], path + ".core");
                auto entries = strings_at(need(tj, "entries", path), path + ".entries");
                const int n = store.domain.dim;
                if (static_cast<int>(entries.size()) != n * n)
                    cfg_fail(path + ".entries", "expected n*n entries over (p,q)");
                std::vector<std::string> vars;
                for (int i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
                for (int i = 1; i <= n; ++i) vars.push_back("y" + std::to_string(i));
                for (const auto& e : entries)
                    A.entries.push_back(
                        expr_fn(Expression::parse(e, vars)));
                store.transports.emplace(name, std::move(A));
            } else {
                cfg_fail(path + ".type", "unknown transport type '" + type + "'");
            }
        }
    if (obj.contains("nforms"))
        for (auto& [name, nj] : obj["nforms"].items()) {
            const std::string path = "$.objects.nforms." + name;
            Vec c = vec_at(need(nj, "center", path), path + ".center");
            Vec w = vec_at(need(nj, "halfwidth", path), path + ".halfwidth");
            store.nforms.emplace(name, bump_nform(store.domain, c, w));
        }
    if (obj.contains("distributions"))
        for (auto& [name, vj] : obj["distributions"].items())
            store.distributions.emplace(
                name, distribution_from_json(store, vj,
                                             "$.objects.distributions." + name));
    return store;
}

// ---- battery resolution ----

struct ResolvedBattery {
    SweepConfig sweep;
    BatteryConfig battery;
    double tolerance = 1e-5;
    int samples = 20;
    Json echo;
};

std::vector<double> eps_grid_from(const Json& bj, const RunOptions& opts,
                                  const std::string& path) {
    int kmin = 3, kmax = 12;
    if (bj.contains("eps_k_min")) kmin = int_at(bj["eps_k_min"], path);
    if (bj.contains("eps_k_max")) kmax = int_at(bj["eps_k_max"], path);
    double emax = bj.contains("eps_max") ? num_at(bj["eps_max"], path)
                                         : std::pow(2.0, -kmin);
    double emin = bj.contains("eps_min") ? num_at(bj["eps_min"], path)
                                         : std::pow(2.0, -kmax);
    if (opts.eps_max > 0) emax = opts.eps_max;
    if (opts.eps_min > 0) emin = opts.eps_min;
    std::vector<double> grid;
    for (double e = emax; e >= emin * (1.0 - 1e-12); e *= 0.5) grid.push_back(e);
    if (grid.size() < 4) cfg_fail(path, "eps grid must have at least 4 points");
    return grid;
}

ResolvedBattery resolve_battery(const ObjectStore& store, const Json& cfg,
                                const RunOptions& opts, int threads) {
    const Json bj = cfg.contains("battery") ? cfg["battery"] : Json::object();
    const std::string path = "$.battery";
    ResolvedBattery rb;
    rb.sweep.threads = threads;

    rb.sweep.K = bj.contains("K") ? box_at(bj["K"], path + ".K")
                                  : Box::cube(store.domain.dim, -1.0, 1.0);
    rb.sweep.eps_grid = eps_grid_from(bj, opts, path);
    if (bj.contains("p_per_axis"))
        rb.sweep.p_per_axis = int_at(bj["p_per_axis"], path + ".p_per_axis");
    if (store.domain.dim >= 2) rb.sweep.p_per_axis = std::min(rb.sweep.p_per_axis, 15);

    if (bj.contains("kernel"))
        rb.sweep.kernel = store.lookup(store.kernels,
                                       str_at(bj["kernel"], path + ".kernel"), "kernel");
    else
        rb.sweep.kernel =
            build_kernel(store.domain, MollifierProfile::bump(), 0, 1.0);

    if (bj.contains("transport"))
        rb.sweep.A = store.lookup(
            store.transports, str_at(bj["transport"], path + ".transport"), "transport");
    else {
        // plateau comfortably beyond K, inside the domain
        Box plateau = rb.sweep.K.inflated(0.25 * rb.sweep.K.max_width() + 0.25);
        double w = 0.5;
        if (store.domain.bounds) {
            Box inner = *store.domain.bounds;
            plateau = plateau.intersection(inner.inflated(-1.0));
            w = std::min(w, 0.45);
        }
        rb.sweep.A = identity_cutoff_transport(store.domain, plateau, w);
    }

    if (bj.contains("X"))
        for (const auto& nm : strings_at(bj["X"], path + ".X"))
            rb.sweep.X_list.push_back(store.field(nm));
    else {
        const int n = store.domain.dim;
        std::vector<std::string> unit(n, "0"), linear(n, "0");
        unit[0] = "1";
        linear[0] = "x1";
        rb.sweep.X_list.push_back(TensorField::from_exprs(store.domain, 1, 0, unit));
        rb.sweep.X_list.push_back(TensorField::from_exprs(store.domain, 1, 0, linear));
    }

    if (bj.contains("B"))
        for (const auto& nm : strings_at(bj["B"], path + ".B"))
            rb.sweep.B_list.push_back(
                store.lookup(store.transports, nm, "transport"));
    else {
        rb.sweep.B_list.push_back(
            lie_derivative_transport(rb.sweep.X_list[0], rb.sweep.X_list[0], rb.sweep.A));
        // a polynomial diagonal-vanishing direction: (q1-p1) dx1 (x) d_x1
        const int n = store.domain.dim;
        TwoPointTensor ups;
        ups.domain = store.domain;
        ups.support = rb.sweep.A.support;
        std::vector<std::string> dx(n, "0"), ddx(n, "0");
        dx[0] = "1";
        ddx[0] = "1";
        std::vector<std::string> vars;
        for (int i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
        for (int i = 1; i <= n; ++i) vars.push_back("y" + std::to_string(i));
        ups.terms.push_back(
            {expr_fn(Expression::parse("y1 - x1", vars)),
             TensorField::from_exprs(store.domain, 0, 1, dx),
             TensorField::from_exprs(store.domain, 1, 0, ddx)});
        TransportOperator Bpoly = two_point_to_transport(ups);
        // taper with the same cutoff as A so it stays compactly supported
        TransportOperator cut = rb.sweep.A;
        TransportOperator tapered;
        tapered.domain = store.domain;
        tapered.support = rb.sweep.A.support;
        const int nn = store.domain.dim;
        for (int i = 0; i < nn; ++i)
            for (int j = 0; j < nn; ++j)
                tapered.entries.push_back(
                    product_fn(Bpoly.entry(i, j), cut.entry(0, 0)));
        rb.sweep.B_list.push_back(std::move(tapered));
    }

    rb.sweep.h = bj.contains("metric")
                     ? store.lookup(store.metrics,
                                    str_at(bj["metric"], path + ".metric"), "metric")
                     : RiemannianMetric::euclidean(store.domain);

    if (bj.contains("j_max")) rb.battery.j_max = int_at(bj["j_max"], path + ".j_max");
    if (bj.contains("l_max")) rb.battery.l_max = int_at(bj["l_max"], path + ".l_max");
    if (bj.contains("N_max")) rb.battery.N_max = num_at(bj["N_max"], path + ".N_max");
    if (bj.contains("slope_tol"))
        rb.battery.slope_tol = num_at(bj["slope_tol"], path + ".slope_tol");
    if (bj.contains("m_list")) {
        rb.battery.m_list.clear();
        for (const auto& m : bj["m_list"])
            rb.battery.m_list.push_back(int_at(m, path + ".m_list"));
    }
    if (bj.contains("tolerance")) rb.tolerance = num_at(bj["tolerance"], path);
    if (bj.contains("samples")) rb.samples = int_at(bj["samples"], path + ".samples");

    rb.echo = Json{{"K", {{rb.sweep.K.lo[0], rb.sweep.K.hi[0]}}},
                   {"eps_max", rb.sweep.eps_grid.front()},
                   {"eps_min", rb.sweep.eps_grid.back()},
                   {"eps_count", rb.sweep.eps_grid.size()},
                   {"p_per_axis", rb.sweep.p_per_axis},
                   {"kernel_order", rb.sweep.kernel.order},
                   {"support_constant", rb.sweep.kernel.support_constant},
                   {"j_max", rb.battery.j_max},
                   {"l_max", rb.battery.l_max},
                   {"X_count", rb.sweep.X_list.size()},
                   {"B_count", rb.sweep.B_list.size()},
                   {"N_max", rb.battery.N_max},
                   {"slope_tol", rb.battery.slope_tol},
                   {"m_list", rb.battery.m_list},
                   {"tolerance", rb.tolerance}};
    return rb;
}

// ---- report helpers ----

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct RateRows {
    std::string csv = "eps,sup_value,test_id\n";
    void add(double eps, double value, const std::string& id) {
        csv += fmt17(eps) + "," + fmt17(value) + "," + id + "\n";
    }
    void add_report(const OrderReport& r, const std::string& id) {
        for (const auto& s : r.samples) add(s.eps, s.sup_value, id);
    }
};

Json report_json(const OrderReport& r) {
    Json j;
    j["test_id"] = r.test_id;
    j["slope"] = r.identically_zero ? Json("identically-zero") : Json(r.fitted_slope);
    j["slope_ci"] = r.slope_ci;
    j["verdict"] = to_string(r.verdict);
    j["flags"] = Json::object({{"identically_zero", r.identically_zero},
                               {"noise_floor", r.noise_floor},
                               {"oscillatory", r.oscillatory},
                               {"superpolynomial", r.superpolynomial},
                               {"eps_truncated", r.eps_truncated}});
    return j;
}

Json dynamics_json(const DynamicsReport& d, RateRows& rows, const std::string& prefix) {
    Json tests = Json::array();
    for (const auto& t : d.tests) {
        std::string id = prefix + "_j" + std::to_string(t.j);
        if (!t.word.empty()) {
            id += "_L";
            for (int w : t.word) id += std::to_string(w);
        }
        if (t.target_m >= 0) id += "_m" + std::to_string(t.target_m);
        Json tj = report_json(t.report);
        tj["test_id"] = id;
        tj["j"] = t.j;
        tj["word"] = t.word;
        tj["kernel_order"] = t.kernel_order;
        if (t.target_m >= 0) tj["target_m"] = t.target_m;
        tj["N_estimate"] = t.N_estimate;
        tests.push_back(tj);
        rows.add_report(t.report, id);
    }
    return Json{{"verdict", to_string(d.verdict)},
                {"N_estimate", d.N_estimate},
                {"tests", tests}};
}

Json association_json(const AssociationReport& a, RateRows& rows,
                      const std::string& prefix) {
    Json rates = Json::array();
    for (const auto& r : a.rates) {
        std::string id = prefix + "_" + r.report.test_id;
        Json rj = report_json(r.report);
        rj["test_id"] = id;
        rj["target"] = r.target;
        rj["tail_max"] = r.tail_max;
        rj["verdict"] = to_string(r.verdict);
        rates.push_back(rj);
        rows.add_report(r.report, id);
    }
    return Json{{"verdict", to_string(a.verdict)}, {"rates", rates}};
}

AssociationProbe default_probe(const ObjectStore& store, const ResolvedBattery& rb) {
    AssociationProbe probe;
    probe.A = rb.sweep.A;
    probe.kernel = rb.sweep.kernel;
    probe.eps_grid = rb.sweep.eps_grid;
    probe.threads = rb.sweep.threads;
    const int n = store.domain.dim;
    Vec c0 = rb.sweep.K.center();
    probe.omega_list.push_back(
        bump_nform(store.domain, c0, Vec::Constant(n, 0.8 * 0.5 * rb.sweep.K.max_width())));
    Vec c1 = c0;
    c1[0] += 0.15 * rb.sweep.K.max_width();
    probe.omega_list.push_back(
        bump_nform(store.domain, c1, Vec::Constant(n, 0.3 * 0.5 * rb.sweep.K.max_width())));
    return probe;
}

void add_dual_basis_probes(AssociationProbe& probe, const ObjectStore& store, int r,
                           int s) {
    // constant dual-basis fields (valence (s,r)) as t-tilde probes
    TensorShape dual{store.domain.dim, s, r};
    for (int k = 0; k < dual.comps(); ++k) {
        Vec e = Vec::Zero(dual.comps());
        e[k] = 1.0;
        probe.t_tilde_list.push_back(TensorField::constant(store.domain, s, r, e));
    }
}

// ---- kind executors ----

struct ExecResult {
    Verdict verdict = Verdict::Indeterminate;
    Json results;
    RateRows rows;
};

ExecResult exec_moments(const ObjectStore& store, const Json& cfg,
                        const ResolvedBattery& rb) {
    ExecResult out;
    const Json& pj = need(cfg, "parameters", "$");
    const TensorField& f = store.field(str_at(need(pj, "field", "$.parameters"),
                                              "$.parameters.field"));
    auto rep = verify_moment_order(rb.sweep.kernel, f, rb.sweep.K, rb.sweep.eps_grid);
    out.rows.add_report(rep, "moments");
    out.results = Json{{"moment_check", report_json(rep)},
                       {"kernel_order", rb.sweep.kernel.order}};
    out.verdict = rep.verdict;
    return out;
}

ExecResult exec_moderate(const ObjectStore& store, const Json& cfg,
                         const ResolvedBattery& rb, bool negligible) {
    ExecResult out;
    RepPtr u = representative_from_json(store, need(cfg, "representative", "$"),
                                        "$.representative");
    if (negligible) {
        auto mod = is_moderate(*u, rb.sweep, rb.battery);
        auto neg = is_negligible(*u, rb.sweep, rb.battery);
        out.results = Json{{"moderate_prerequisite", dynamics_json(mod, out.rows, "mod")},
                           {"negligible", dynamics_json(neg, out.rows, "neg")}};
        out.verdict = (mod.verdict == Verdict::Pass && neg.verdict == Verdict::Pass)
                          ? Verdict::Pass
                          : Verdict::Fail;
    } else {
        auto mod = is_moderate(*u, rb.sweep, rb.battery);
        out.results = Json{{"moderate", dynamics_json(mod, out.rows, "mod")}};
        out.verdict = mod.verdict;
    }
    return out;
}

ExecResult exec_associate(const ObjectStore& store, const Json& cfg,
                          const ResolvedBattery& rb, bool shadow) {
    ExecResult out;
    RepPtr u = representative_from_json(store, need(cfg, "representative", "$"),
                                        "$.representative");
    AssociationProbe probe = default_probe(store, rb);
    probe.assoc_tol = rb.tolerance;
    add_dual_basis_probes(probe, store, u->r(), u->s());
    if (shadow) {
        const DistPtr& v = store.dist(str_at(
            need(need(cfg, "parameters", "$"), "target", "$.parameters"),
            "$.parameters.target"));
        auto rep = shadow_matches(*u, *v, probe);
        out.results = Json{{"shadow", association_json(rep, out.rows, "shadow")}};
        out.verdict = rep.verdict;
    } else {
        auto rep = associated_zero(*u, probe);
        out.results = Json{{"associated_zero", association_json(rep, out.rows, "assoc")}};
        out.verdict = rep.verdict;
    }
    return out;
}

ExecResult exec_lie_commute(const ObjectStore& store, const Json& cfg,
                            const ResolvedBattery& rb) {
    ExecResult out;
    const Json& pj = need(cfg, "parameters", "$");
    std::vector<DistPtr> vs;
    for (const auto& nm : strings_at(need(pj, "distributions", "$.parameters"),
                                     "$.parameters.distributions"))
        vs.push_back(store.dist(nm));
    std::vector<TensorField> Xs = rb.sweep.X_list;

    double worst = 0.0;
    Json cases = Json::array();
    for (size_t vi = 0; vi < vs.size(); ++vi) {
        for (size_t xi = 0; xi < Xs.size(); ++xi) {
            RepPtr lhs = hat_lie(Xs[xi], embed_distribution(vs[vi]));
            RepPtr rhs = embed_distribution(lie_derivative_distribution(Xs[xi], vs[vi]));
            double dev = 0.0;
            const std::string id =
                "lie_v" + std::to_string(vi) + "_X" + std::to_string(xi);
            for (double eps : rb.sweep.eps_grid) {
                Box reach = rb.sweep.K.inflated(eps * rb.sweep.kernel.support_constant);
                if (!store.domain.contains(reach)) continue;
                double dev_eps = 0.0;
                for (const auto& p : rb.sweep.K.lattice(11)) {
                    NForm phi = rb.sweep.kernel.at(eps, p);
                    Vec a = lhs->eval(phi, p, rb.sweep.A);
                    Vec b = rhs->eval(phi, p, rb.sweep.A);
                    const double scale =
                        std::max(1.0, fiber_norm(rb.sweep.h, p, lhs->valence(), b));
                    dev_eps = std::max(
                        dev_eps,
                        fiber_norm(rb.sweep.h, p, lhs->valence(), a - b) / scale);
                }
                out.rows.add(eps, dev_eps, id);
                dev = std::max(dev, dev_eps);
            }
            worst = std::max(worst, dev);
            cases.push_back(Json{{"test_id", id}, {"max_deviation", dev}});
        }
    }
    out.results = Json{{"cases", cases},
                       {"max_deviation", worst},
                       {"tolerance", rb.tolerance}};
    out.verdict = worst <= rb.tolerance ? Verdict::Pass : Verdict::Fail;
    return out;
}

ExecResult exec_pullback_commute(const ObjectStore& store, const Json& cfg,
                                 const ResolvedBattery& rb, long long seed) {
    ExecResult out;
    const Json& pj = need(cfg, "parameters", "$");
    std::vector<DistPtr> vs;
    for (const auto& nm : strings_at(need(pj, "distributions", "$.parameters"),
                                     "$.parameters.distributions"))
        vs.push_back(store.dist(nm));
    const Diffeomorphism& mu = store.lookup(
        store.diffeos, str_at(need(pj, "mu", "$.parameters"), "$.parameters.mu"),
        "diffeomorphism");

    std::mt19937_64 rng(static_cast<uint64_t>(seed));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    Json cases = Json::array();
    for (size_t vi = 0; vi < vs.size(); ++vi) {
        RepPtr lhs = hat_pullback(mu, embed_distribution(vs[vi]));
        RepPtr rhs = embed_distribution(pullback_distribution(mu, vs[vi]));
        double dev = 0.0;
        const std::string id = "pullback_v" + std::to_string(vi);
        for (int smp = 0; smp < rb.samples; ++smp) {
            const double eps =
                rb.sweep.eps_grid[smp % rb.sweep.eps_grid.size()];
            Vec p = rb.sweep.K.lo +
                    (rb.sweep.K.widths().array() *
                     (0.1 + 0.8 * unit(rng)))
                        .matrix();
            Box reach = Box(p, p).inflated(eps * rb.sweep.kernel.support_constant);
            if (!store.domain.contains(reach)) continue;
            NForm phi = rb.sweep.kernel.at(eps, p);
            Vec a = lhs->eval(phi, p, rb.sweep.A);
            Vec b = rhs->eval(phi, p, rb.sweep.A);
            const double scale =
                std::max(1.0, fiber_norm(rb.sweep.h, p, lhs->valence(), b));
            const double d =
                fiber_norm(rb.sweep.h, p, lhs->valence(), a - b) / scale;
            out.rows.add(eps, d, id);
            dev = std::max(dev, d);
        }
        worst = std::max(worst, dev);
        cases.push_back(Json{{"test_id", id}, {"max_deviation", dev}});
    }
    out.results = Json{{"cases", cases},
                       {"max_deviation", worst},
                       {"tolerance", rb.tolerance}};
    out.verdict = worst <= rb.tolerance ? Verdict::Pass : Verdict::Fail;
    return out;
}

ExecResult exec_saturation(const ObjectStore& store, const Json& cfg,
                           const ResolvedBattery& rb) {
    ExecResult out;
    RepPtr u = representative_from_json(store, need(cfg, "representative", "$"),
                                        "$.representative");
    const Json& pj = need(cfg, "parameters", "$");
    std::vector<TensorField> basis;
    for (const auto& nm :
         strings_at(need(pj, "basis", "$.parameters"), "$.parameters.basis"))
        basis.push_back(store.field(nm));
    const bool neg_mode =
        pj.contains("negligible") && pj["negligible"].get<bool>();
    auto rep = saturation_check(u, basis, rb.sweep, rb.battery, neg_mode);
    Json sats = Json::array();
    for (size_t i = 0; i < rep.saturates.size(); ++i)
        sats.push_back(dynamics_json(rep.saturates[i], out.rows,
                                     "sat" + std::to_string(i)));
    out.results = Json{{"verdict", to_string(rep.verdict)},
                       {"direct", dynamics_json(rep.direct, out.rows, "direct")},
                       {"saturates", sats},
                       {"agree", rep.agree}};
    out.verdict = rep.verdict;
    return out;
}

ExecResult exec_embed_diff(const ObjectStore& store, const Json& cfg,
                           const ResolvedBattery& rb) {
    ExecResult out;
    const Json& pj = need(cfg, "parameters", "$");
    auto field_names = strings_at(need(pj, "fields", "$.parameters"),
                                  "$.parameters.fields");
    std::vector<int> orders{0, 1, 2};
    if (pj.contains("orders")) {
        orders.clear();
        for (const auto& m : pj["orders"]) orders.push_back(m.get<int>());
    }
    bool pass = true;
    Json cases = Json::array();
    for (const auto& fname : field_names) {
        const TensorField& t = store.field(fname);
        RepPtr diff = linear_combination(
            {{1.0, embed_distribution(rho_embed(t))}, {-1.0, embed_smooth(t)}});
        std::vector<double> slopes;
        for (int m : orders) {
            SweepConfig sc = rb.sweep;
            sc.kernel = build_kernel(store.domain, rb.sweep.kernel.profile.base(), m,
                                     rb.sweep.kernel.support_constant);
            OrderReport r = sweep(*diff, sc, 0, {});
            const std::string id = "embed_diff_" + fname + "_m" + std::to_string(m);
            out.rows.add_report(r, id);
            const double slope =
                r.identically_zero ? 1e6 : r.fitted_slope;
            slopes.push_back(slope);
            const bool ok = slope >= m + 1 - rb.battery.slope_tol;
            if (!ok) pass = false;
            Json cj = report_json(r);
            cj["test_id"] = id;
            cj["kernel_order"] = m;
            cj["required_slope"] = m + 1 - rb.battery.slope_tol;
            cj["ok"] = ok;
            cases.push_back(cj);
        }
        for (size_t i = 1; i < slopes.size(); ++i)
            if (slopes[i] < slopes[i - 1] - 0.25) pass = false;  // monotone in m
    }
    out.results = Json{{"cases", cases}};
    out.verdict = pass ? Verdict::Pass : Verdict::Fail;
    return out;
}

ExecResult exec_nogo(const ObjectStore& store, const Json& cfg,
                     const ResolvedBattery& rb) {
    ExecResult out;
    const ChartDomain& dom = store.domain;
    if (dom.dim != 1) cfg_fail("$.domain.dim", "the no-go experiment runs on R");

    // two coordinate representations of the same distributional vector field
    DistPtr dprime = delta_distribution(dom, Vec::Zero(1), MultiIndex::unit(1, 0));
    TensorField one_plus_x2 = TensorField::from_exprs(dom, 0, 0, {"1 + x1^2"});
    DistPtr dprime_scaled = smooth_coeff_product(one_plus_x2, dprime);
    TensorField ddx = TensorField::from_exprs(dom, 1, 0, {"1"});
    TensorField ddx_scaled = TensorField::from_exprs(dom, 1, 0, {"1/(1 + x1^2)"});

    RepPtr u1 = tensor_product(embed_distribution(dprime), embed_smooth(ddx));
    RepPtr u2 =
        tensor_product(embed_distribution(dprime_scaled), embed_smooth(ddx_scaled));
    RepPtr diff = linear_combination({{1.0, u1}, {-1.0, u2}});

    // oracle: the sup of the difference tends to max_s |s^2 rho_m'(s)| as the
    // residual (1+p^2)^-1 factor tends to 1 (p = O(eps) at the max)
    const auto& prof = rb.sweep.kernel.profile;
    double c_rho = 0.0;
    for (int i = 0; i <= 40000; ++i) {
        const double sp = -1.0 + 2.0 * i / 40000.0;
        c_rho = std::max(c_rho, sp * sp * std::fabs(prof.deriv(sp, 1)));
    }

    OrderReport r = sweep(*diff, rb.sweep, 0, {});
    out.rows.add_report(r, "nogo_diff");
    bool constant_ok = true;
    Json tail = Json::array();
    const int tail_n = std::min<size_t>(4, r.samples.size());
    for (int k = 0; k < tail_n; ++k) {
        const auto& smp = r.samples[r.samples.size() - 1 - k];
        const double rel = std::fabs(smp.sup_value - c_rho) / c_rho;
        tail.push_back(Json{{"eps", smp.eps},
                            {"sup_value", smp.sup_value},
                            {"relative_error", rel}});
        if (rel > 0.10) constant_ok = false;
    }

    auto mod1 = is_moderate(*u1, rb.sweep, rb.battery);
    auto mod2 = is_moderate(*u2, rb.sweep, rb.battery);
    auto neg = is_negligible(*diff, rb.sweep, rb.battery);

    out.results = Json{{"oracle_constant", c_rho},
                       {"tail", tail},
                       {"constant_within_10pct", constant_ok},
                       {"difference_sweep", report_json(r)},
                       {"u1_moderate", dynamics_json(mod1, out.rows, "u1_mod")},
                       {"u2_moderate", dynamics_json(mod2, out.rows, "u2_mod")},
                       {"difference_negligible", dynamics_json(neg, out.rows, "diff_neg")}};
    // the no-go is reproduced when both sides are moderate yet the difference
    // is NOT negligible and hugs the oracle constant
    const bool reproduced = constant_ok && mod1.verdict == Verdict::Pass &&
                            mod2.verdict == Verdict::Pass &&
                            neg.verdict == Verdict::Fail;
    out.verdict = reproduced ? Verdict::Pass : Verdict::Fail;
    return out;
}

ExecResult exec_schwartz(const ObjectStore& store, const Json& cfg,
                         const ResolvedBattery& rb) {
    ExecResult out;
    const ChartDomain& dom = store.domain;
    if (dom.dim != 1) cfg_fail("$.domain.dim", "the product chain runs on R");

    DistPtr vp = principal_value_distribution(dom);
    TensorField x = TensorField::from_exprs(dom, 0, 0, {"x1"});
    DistPtr x_vp = smooth_coeff_product(x, vp);  // equals 1 in D'
    TensorField one = TensorField::from_exprs(dom, 0, 0, {"1"});
    DistPtr delta = delta_distribution(dom, Vec::Zero(1));

    AssociationProbe probe = default_probe(store, rb);
    probe.assoc_tol = rb.tolerance;
    probe.t_tilde_list.push_back(one);

    // (1) iota(x vp(1/x)) - sigma(1) is associated with 0
    RepPtr chain1 = linear_combination(
        {{1.0, embed_distribution(x_vp)}, {-1.0, embed_smooth(one)}});
    auto r1 = associated_zero(*chain1, probe);
    // (2) iota(delta) converges weakly to delta
    auto r2 = shadow_matches(*embed_distribution(delta), *delta, probe);
    // (3) iota(delta) is NOT associated with 0
    auto r3 = associated_zero(*embed_distribution(delta), probe);

    out.results =
        Json{{"x_vp_minus_one_associated_zero", association_json(r1, out.rows, "xvp")},
             {"iota_delta_shadows_delta", association_json(r2, out.rows, "dshadow")},
             {"iota_delta_associated_zero", association_json(r3, out.rows, "dzero")}};
    const bool reproduced = r1.verdict == Verdict::Pass &&
                            r2.verdict == Verdict::Pass && r3.verdict == Verdict::Fail;
    out.verdict = reproduced ? Verdict::Pass : Verdict::Fail;
    return out;
}

ExecResult exec_shadow_suite(int threads) {
    ExecResult out;
    Json detail;
    auto rep = product_association_suite(&detail, threads);
    for (const auto& r : rep.rates) out.rows.add_report(r.report, r.report.test_id);
    out.results = detail;
    out.verdict = rep.verdict;
    return out;
}

std::string env_fingerprint() {
    std::string s = "gcc-";
#ifdef __VERSION__
    s += __VERSION__;
#endif
    s += " eigen-" + std::to_string(EIGEN_WORLD_VERSION) + "." +
         std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION);
    return s;
}

}  // namespace

RunResult run_experiment(const Json& config, const RunOptions& opts) {
    RunResult res;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const std::string kind = str_at(need(config, "kind", "$"), "$.kind");
        const std::string name =
            config.contains("name") ? str_at(config["name"], "$.name") : kind;
        long long seed = config.contains("seed")
                             ? config["seed"].get<long long>()
                             : 1;
        if (opts.seed >= 0) seed = opts.seed;
        int threads = config.contains("threads") ? config["threads"].get<int>() : 1;
        if (opts.threads > 0) threads = opts.threads;

        ObjectStore store = build_objects(config);
        ResolvedBattery rb = resolve_battery(store, config, opts, threads);

        ExecResult ex;
        if (kind == "moments") ex = exec_moments(store, config, rb);
        else if (kind == "moderate") ex = exec_moderate(store, config, rb, false);
        else if (kind == "negligible") ex = exec_moderate(store, config, rb, true);
        else if (kind == "associate") ex = exec_associate(store, config, rb, false);
        else if (kind == "shadow") ex = exec_associate(store, config, rb, true);
        else if (kind == "lie-commute") ex = exec_lie_commute(store, config, rb);
        else if (kind == "pullback-commute")
            ex = exec_pullback_commute(store, config, rb, seed);
        else if (kind == "saturation") ex = exec_saturation(store, config, rb);
        else if (kind == "embed-diff") ex = exec_embed_diff(store, config, rb);
        else if (kind == "nogo") ex = exec_nogo(store, config, rb);
        else if (kind == "schwartz") ex = exec_schwartz(store, config, rb);
        else if (kind == "shadow-suite") ex = exec_shadow_suite(threads);
        else cfg_fail("$.kind", "unknown test kind '" + kind + "'");

        const auto t1 = std::chrono::steady_clock::now();
        res.report = Json{
            {"name", name},
            {"kind", kind},
            {"verdict", to_string(ex.verdict)},
            {"seed", seed},
            {"threads", threads},
            {"battery", rb.echo},
            {"results", ex.results},
            {"config", Json::parse(normalize_config(config))},
            {"environment", env_fingerprint()},
            {"timings",
             {{"wall_seconds",
               std::chrono::duration<double>(t1 - t0).count()}}}};
        res.rates_csv = ex.rows.csv;
        res.verdict = to_string(ex.verdict);
        res.exit_code = ex.verdict == Verdict::Pass ? 0 : 2;
    } catch (const std::exception& e) {
        res.exit_code = 1;
        res.verdict = "error";
        res.report = Json{{"error", e.what()}};
        return res;
    }

    if (!opts.out_dir.empty()) {
        std::filesystem::create_directories(opts.out_dir);
        std::ofstream rj(opts.out_dir + "/report.json");
        rj << res.report.dump(2) << "\n";
        std::ofstream rc(opts.out_dir + "/rates.csv");
        rc << res.rates_csv;
    }
    return res;
}

RunResult run_experiment_file(const std::string& path, const RunOptions& opts) {
    std::ifstream in(path);
    if (!in) {
        RunResult res;
        res.exit_code = 1;
        res.verdict = "error";
        res.report = Json{{"error", "cannot open config file: " + path}};
        return res;
    }
    Json cfg;
    try {
        in >> cfg;
    } catch (const std::exception& e) {
        RunResult res;
        res.exit_code = 1;
        res.verdict = "error";
        res.report = Json{{"error", std::string("config parse failure: ") + e.what()}};
        return res;
    }
    return run_experiment(cfg, opts);
}

std::string normalize_config(const Json& config) { return config.dump(2); }

// ---- canonical experiments ----

namespace {

Json base_domain() {
    return Json{{"dim", 1}, {"bounds", Json::array({Json::array({-6.0, 6.0})})}};
}

Json registry_schwartz() {
    return Json{{"name", "schwartz"},
                {"kind", "schwartz"},
                {"seed", 1},
                {"domain", base_domain()},
                {"battery", Json{{"K", Json::array({Json::array({-1.0, 1.0})})},
                                 {"tolerance", 1e-5}}}};
}

Json registry_nogo() {
    return Json{{"name", "nogo-vector"},
                {"kind", "nogo"},
                {"seed", 1},
                {"domain", base_domain()},
                {"objects",
                 Json{{"kernels",
                       Json{{"phi", Json{{"profile", "bump"},
                                         {"order", 1},
                                         {"support_constant", 1.0}}}}}}},
                {"battery", Json{{"K", Json::array({Json::array({-1.0, 1.0})})},
                                 {"kernel", "phi"},
                                 {"l_max", 1}}}};
}

Json registry_embed_diff() {
    return Json{
        {"name", "embed-diff"},
        {"kind", "embed-diff"},
        {"seed", 1},
        {"domain", base_domain()},
        {"objects",
         Json{{"fields", Json{{"t_sq", Json{{"components", Json::array({"x1^2"})}}},
                              {"t_sin", Json{{"components", Json::array({"sin(x1)"})}}},
                              {"t_xexp",
                               Json{{"components",
                                     Json::array({"x1 * exp(0 - x1^2)"})}}}}}}},
        {"parameters", Json{{"fields", Json::array({"t_sq", "t_sin", "t_xexp"})},
                            {"orders", Json::array({0, 1, 2})}}},
        {"battery", Json{{"K", Json::array({Json::array({-1.0, 1.0})})}}}};
}

Json registry_shadow_suite() {
    return Json{{"name", "shadow-suite"},
                {"kind", "shadow-suite"},
                {"seed", 1},
                {"domain", base_domain()}};
}

Json registry_diffeo_commute() {
    return Json{
        {"name", "diffeo-commute"},
        {"kind", "pullback-commute"},
        {"seed", 1},
        {"domain", base_domain()},
        {"objects",
         Json{{"diffeomorphisms",
               Json{{"mu", Json{{"forward", Json::array({"x1 + 0.3 * x1^3"})}}}}},
              {"distributions",
               Json{{"delta0", Json{{"kind", "delta"}, {"point", Json::array({0.0})}}},
                    {"deltap", Json{{"kind", "delta"},
                                    {"point", Json::array({0.0})},
                                    {"derivative", Json::array({1})}}},
                    {"step", Json{{"kind", "heaviside"}}},
                    {"vp", Json{{"kind", "principal_value"}}}}}}},
        {"parameters",
         Json{{"mu", "mu"},
              {"distributions", Json::array({"delta0", "deltap", "step", "vp"})}}},
        {"battery", Json{{"K", Json::array({Json::array({-1.0, 1.0})})},
                         {"tolerance", 1e-5},
                         {"samples", 20}}}};
}

Json registry_lie_commute() {
    return Json{
        {"name", "lie-commute"},
        {"kind", "lie-commute"},
        {"seed", 1},
        {"domain", base_domain()},
        {"objects",
         Json{{"distributions",
               Json{{"delta0", Json{{"kind", "delta"}, {"point", Json::array({0.0})}}},
                    {"deltap", Json{{"kind", "delta"},
                                    {"point", Json::array({0.0})},
                                    {"derivative", Json::array({1})}}},
                    {"step", Json{{"kind", "heaviside"}}},
                    {"vp", Json{{"kind", "principal_value"}}}}}}},
        {"parameters",
         Json{{"distributions", Json::array({"delta0", "deltap", "step", "vp"})}}},
        {"battery", Json{{"K", Json::array({Json::array({-1.0, 1.0})})},
                         {"tolerance", 1e-5}}}};
}

Json registry_moments() {
    return Json{
        {"name", "moments"},
        {"kind", "moments"},
        {"seed", 1},
        {"domain", base_domain()},
        {"objects",
         Json{{"fields", Json{{"f", Json{{"components", Json::array({"x1^2"})}}}}},
              {"kernels", Json{{"phi", Json{{"profile", "bump"},
                                            {"order", 1},
                                            {"support_constant", 1.0}}}}}}},
        {"parameters", Json{{"field", "f"}}},
        {"battery", Json{{"K", Json::array({Json::array({-1.0, 1.0})})},
                         {"kernel", "phi"}}}};
}

}  // namespace

std::vector<std::string> registry_names() {
    return {"schwartz",       "nogo-vector", "embed-diff", "shadow-suite",
            "diffeo-commute", "lie-commute", "moments"};
}

Json registry_config(const std::string& name) {
    if (name == "schwartz") return registry_schwartz();
    if (name == "nogo-vector") return registry_nogo();
    if (name == "embed-diff") return registry_embed_diff();
    if (name == "shadow-suite") return registry_shadow_suite();
    if (name == "diffeo-commute") return registry_diffeo_commute();
    if (name == "lie-commute") return registry_lie_commute();
    if (name == "moments") return registry_moments();
    throw ConfigError("unknown registry experiment '" + name + "'");
}

AssociationReport product_association_suite(Json* detail, int threads) {
    ChartDomain dom(1, Box::cube(1, -6.0, 6.0));
    SmoothingKernel kernel = build_kernel(dom, MollifierProfile::bump(), 0, 1.0);
    Box K = Box::cube(1, -1.0, 1.0);
    TransportOperator A =
        identity_cutoff_transport(dom, Box::cube(1, -2.0, 2.0), 0.5);

    AssociationProbe base;
    base.A = A;
    base.kernel = kernel;
    base.threads = threads;
    base.omega_list.push_back(bump_nform(dom, Vec::Zero(1), Vec::Constant(1, 0.8)));
    Vec c1 = Vec::Constant(1, 0.3);
    base.omega_list.push_back(bump_nform(dom, c1, Vec::Constant(1, 0.4)));

    struct Case {
        std::string name;
        RepPtr u;
        DistPtr target;
        int r, s;
    };
    std::vector<Case> cases;

    // smooth (1,0) times distributional (0,1): iota(t) (x) iota(v) vs t (x) v
    TensorField ddx = TensorField::from_exprs(dom, 1, 0, {"1"});
    TensorField dx_form = TensorField::from_exprs(dom, 0, 1, {"1"});
    DistPtr delta = delta_distribution(dom, Vec::Zero(1));
    DistPtr delta_dx = smooth_coeff_product(dx_form, delta);
    cases.push_back(
        {"smooth_x_delta_form",
         tensor_product(embed_distribution(rho_embed(ddx)), embed_distribution(delta_dx)),
         smooth_coeff_product(tensor_product_field(ddx, dx_form), delta), 1, 1});

    // continuous (smooth here) pair of vector fields, Cor-style (ii)
    TensorField t12 = TensorField::from_exprs(dom, 1, 0, {"1/(1 + x1^2)"});
    cases.push_back({"continuous_vector_pair",
                     tensor_product(embed_distribution(rho_embed(t12)),
                                    embed_distribution(rho_embed(t12))),
                     regular_distribution(tensor_product_field(t12, t12)), 2, 0});

    // genuinely continuous, non-smooth scalars: |x| . |x| = x^2
    TensorField absx = TensorField::from_exprs(dom, 0, 0, {"abs(x1)"});
    TensorField xsq = TensorField::from_exprs(dom, 0, 0, {"x1^2"});
    cases.push_back({"abs_square",
                     tensor_product(embed_distribution(rho_embed(absx)),
                                    embed_distribution(rho_embed(absx))),
                     regular_distribution(xsq), 0, 0});

    // degenerate: zero factor
    TensorField zero = TensorField::zero(dom, 0, 0);
    cases.push_back({"zero_factor",
                     tensor_product(embed_distribution(rho_embed(zero)),
                                    embed_distribution(delta)),
                     regular_distribution(zero), 0, 0});

    AssociationReport out;
    out.verdict = Verdict::Pass;
    Json cases_json = Json::array();
    for (const auto& c : cases) {
        AssociationProbe probe = base;
        TensorShape dual{1, c.s, c.r};
        for (int k = 0; k < dual.comps(); ++k) {
            Vec e = Vec::Zero(dual.comps());
            e[k] = 1.0;
            probe.t_tilde_list.push_back(TensorField::constant(dom, c.s, c.r, e));
        }
        auto rep = shadow_matches(*c.u, *c.target, probe);
        for (auto& r : rep.rates) {
            r.report.test_id = c.name + "_" + r.report.test_id;
            out.rates.push_back(r);
        }
        if (rep.verdict != Verdict::Pass) out.verdict = Verdict::Fail;
        cases_json.push_back(
            Json{{"case", c.name}, {"verdict", to_string(rep.verdict)}});
    }
    if (detail) *detail = Json{{"cases", cases_json}};
    return out;
}

}  // namespace gentensor
