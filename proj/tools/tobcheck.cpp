// tobcheck: command-line front end for the tob library.
//
// Exit codes: 0 ok, 1 a check or the self-test failed, 2 schema or
// configuration error, 3 group cap exceeded, 4 solver iteration limit.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "tob/io.hpp"
#include "tob/relstruct.hpp"
#include "tob/selftest.hpp"
#include "tob/seqmodel.hpp"

namespace {

using tob::io::json;

enum Exit { ok = 0, check_failed = 1, schema = 2, cap_exceeded = 3, solver_limit = 4 };

struct Config {
    std::string command;
    std::string input;
    std::string format = "text";
    double tol = tob::default_tol;
    double solver_tol = 1e-7;
    std::vector<double> eps{0.5, 0.25, 0.1};
    std::vector<double> delta{0.5, 0.1, 0.01};
    std::size_t cap = tob::default_group_cap;
    std::size_t max_iter = 10'000;
    std::size_t n = 0;
    std::uint64_t seed = tob::selftest::Options{}.seed;
    bool inject_fault = false;
};

json echo(const Config& c) {
    json out{{"command", c.command}};
    if (!c.input.empty()) out["input"] = c.input;
    out["format"] = c.format;
    out["tol"] = c.tol;
    out["solver_tol"] = c.solver_tol;
    out["eps"] = c.eps;
    out["delta"] = c.delta;
    out["cap"] = c.cap;
    out["max_iter"] = c.max_iter;
    if (c.command == "counterexample") out["n"] = c.n;
    if (c.command == "selftest") {
        out["seed"] = c.seed;
        out["inject_fault"] = c.inject_fault;
    }
    return out;
}

json header(const Config& c) { return json{{"tool", "tobcheck"}, {"version", TOB_VERSION}, {"config", echo(c)}}; }

tob::io::Document load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw tob::io::SchemaError(path, 0, "", "cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return tob::io::Document(ss.str(), path);
}

json nullable(std::size_t v) { return v == tob::never ? json(nullptr) : json(v); }

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

// Round-trip precision for CSV cells.
std::string full(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string fmt(const tob::StoneElement& a) {
    std::string s = "(";
    for (std::size_t i = 0; i < a.size(); ++i) s += (i ? ", " : "") + fmt(a[i]);
    return s + ")";
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

int cmd_analyze(const Config& cfg) {
    const auto doc = load(cfg.input);
    const auto data = tob::io::read_extension(doc, cfg.tol);
    const auto validation = tob::validate_extension(data, cfg.tol);
    if (!validation.valid) {
        for (const auto& v : validation.violations) std::cerr << cfg.input << ": invalid extension: " << v << "\n";
        if (cfg.format == "json") {
            auto out = header(cfg);
            out["validation"] = {{"valid", false}, {"violations", validation.violations}};
            std::cout << out.dump(2) << "\n";
        }
        return schema;
    }
    const tob::Extension ext(data, cfg.cap, cfg.tol);
    const auto& X = ext.X();
    const auto& Y = ext.Y();
    const auto& labels = X.points();
    const auto& base_labels = Y.points();

    tob::CrossCheckOptions co;
    co.tol = cfg.tol;
    co.eps = cfg.eps;
    co.delta = cfg.delta;
    const auto rep = tob::theorem_cross_check(ext, co);
    const bool passed = rep.passed(co.subspace_tol) && rep.corollary_agrees();

    json cond = json::array();
    for (std::size_t x = 0; x < X.size(); ++x) {
        const auto e = ext.cond_expectation(ext.point_indicator(x));
        const auto y = ext.factor(x);
        cond.push_back({{"point", labels.label(x)},
                        {"base_point", base_labels.label(y)},
                        {"value", e(static_cast<Eigen::Index>(y)).real()}});
    }

    json ap = json::array();
    std::ostringstream csv;
    csv << "basis,eps,verdict,witness_size,defect\n";
    for (std::size_t x = 0; x < X.size(); ++x) {
        const auto r = tob::is_conditionally_ap(ext.point_indicator(x), ext, cfg.eps, cfg.tol);
        json sizes = json::array(), defects = json::array();
        for (std::size_t k = 0; k < r.eps.size(); ++k) {
            sizes.push_back(r.witnesses[k].size());
            defects.push_back(tob::sup_norm(r.defects[k]));
            csv << labels.label(x) << "," << r.eps[k] << "," << (r.verdicts[k] ? "true" : "false") << ","
                << r.witnesses[k].size() << "," << full(tob::sup_norm(r.defects[k])) << "\n";
        }
        ap.push_back({{"point", labels.label(x)},
                      {"eps", r.eps},
                      {"verdicts", r.verdicts},
                      {"witness_sizes", sizes},
                      {"defects", defects}});
    }

    json thresholds = json::array();
    for (std::size_t x = 0; x < X.size(); ++x) {
        const auto u = tob::greedy_chain_defects(tob::orbit(ext.point_indicator(x), ext, cfg.tol));
        for (double d : cfg.delta) {
            const auto eg = tob::egoroff_localize(u, Y.weights(), d, cfg.eps, cfg.tol);
            json kept = json::array(), th = json::array();
            for (std::size_t y = 0; y < Y.size(); ++y)
                if (eg.keep[y]) kept.push_back(base_labels.label(y));
            for (auto t : eg.thresholds) th.push_back(nullable(t));
            thresholds.push_back({{"point", labels.label(x)},
                                  {"delta", d},
                                  {"removed_mass", eg.removed_mass},
                                  {"kept", kept},
                                  {"eps", eg.eps},
                                  {"thresholds", th},
                                  {"uniform", eg.uniform}});
        }
    }

    if (cfg.format == "csv") {
        std::cout << csv.str();
        return passed ? ok : check_failed;
    }

    json distances{{"fm_ap", rep.fm_ap},
                   {"fm_tob", rep.fm_tob},
                   {"ap_tob", rep.ap_tob},
                   {"fm_in_ap", rep.fm_in_ap},
                   {"ap_in_tob", rep.ap_in_tob},
                   {"group_commutator", rep.group_commutator},
                   {"module_commutator", rep.module_commutator},
                   {"submodule_invariance", rep.submodule_invariance}};
    if (cfg.format == "json") {
        auto out = header(cfg);
        out["system"] = {{"points", rep.points},
                         {"base_points", rep.base_points},
                         {"group_order", rep.group_order},
                         {"generators", data.upstairs_generators.size()}};
        out["validation"] = {{"valid", true}, {"violations", json::array()}};
        out["conditional_expectation"] = cond;
        out["kronecker_dim"] = rep.kronecker_dim;
        out["discrete_spectrum"] = rep.discrete_spectrum;
        out["ap_verdicts"] = ap;
        out["subspace_distances"] = distances;
        out["egoroff_thresholds"] = thresholds;
        out["cross_check"] = {{"dims", {{"finite_rank", rep.fm_dim}, {"almost_periodic", rep.ap_dim}, {"tob_orbit", rep.tob_dim}}},
                              {"discrete_spectrum", rep.discrete_spectrum},
                              {"ap_dense", rep.ap_dense},
                              {"tob_dense", rep.tob_dense},
                              {"localizable", rep.localizable},
                              {"heine_borel", rep.heine_borel},
                              {"heine_borel_checked", rep.heine_borel_checked},
                              {"heine_borel_skipped", rep.heine_borel_skipped},
                              {"ap_module", rep.ap_module},
                              {"weakly_mixing_dim", rep.weakly_mixing_dim},
                              {"characterizations_agree", rep.corollary_agrees()},
                              {"passed", passed},
                              {"note", rep.note}};
        std::cout << out.dump(2) << "\n";
        return passed ? ok : check_failed;
    }

    std::cout << "tobcheck " << TOB_VERSION << " analyze " << cfg.input << "\n"
              << "system: " << rep.points << " points over " << rep.base_points << " base points, group order "
              << rep.group_order << "\n"
              << "validation: ok\n\nconditional expectation of point indicators:\n";
    for (const auto& row : cond)
        std::cout << "  " << std::setw(8) << row["point"].get<std::string>() << " -> " << std::setw(8)
                  << row["base_point"].get<std::string>() << "  " << fmt(row["value"].get<double>()) << "\n";
    std::cout << "\nalmost periodic point indicators:\n";
    for (const auto& row : ap) {
        std::cout << "  " << std::setw(8) << row["point"].get<std::string>();
        for (std::size_t k = 0; k < row["eps"].size(); ++k)
            std::cout << "  eps " << fmt(row["eps"][k].get<double>()) << ": "
                      << (row["verdicts"][k].get<bool>() ? "yes" : "no") << " (" << row["witness_sizes"][k] << ")";
        std::cout << "\n";
    }
    std::cout << "\nkronecker dimension: " << rep.kronecker_dim << " of " << rep.points << "\n"
              << "discrete spectrum: " << (rep.discrete_spectrum ? "yes" : "no") << "\n"
              << "subspace distances:\n";
    for (const auto& [k, v] : distances.items()) std::cout << "  " << std::setw(22) << k << "  " << fmt(v.get<double>()) << "\n";
    std::cout << "characterizations agree: " << (rep.corollary_agrees() ? "yes" : "no") << "\n"
              << "note: " << rep.note << "\n"
              << "result: " << (passed ? "PASS" : "FAIL") << "\n";
    return passed ? ok : check_failed;
}

// ---------------------------------------------------------------------------
// tob / zonotope / cyclic
// ---------------------------------------------------------------------------

int cmd_tob(const Config& cfg) {
    const auto doc = load(cfg.input);
    const auto in = tob::io::read_set_input(doc);
    const auto& labels = in.points;
    const std::size_t n = in.space.points();

    std::optional<tob::DefectReport> against;
    if (in.F) against = tob::defect(in.M, *in.F);
    std::vector<tob::UtobReport> utob;
    for (double e : cfg.eps) utob.push_back(tob::is_utob(in.M, e, cfg.tol));

    if (cfg.format == "csv") {
        std::cout << "point";
        if (against) std::cout << ",defect,attained_by";
        for (double e : cfg.eps) std::cout << ",utob_defect_eps_" << e;
        std::cout << "\n";
        for (std::size_t w = 0; w < n; ++w) {
            std::cout << labels.label(w);
            if (against) std::cout << "," << full(against->value[w]) << "," << against->attained_by[w];
            for (const auto& u : utob) std::cout << "," << full(u.defect.value[w]);
            std::cout << "\n";
        }
        return ok;
    }
    if (cfg.format == "json") {
        auto out = header(cfg);
        out["points"] = tob::io::to_json(labels);
        if (against)
            out["defect"] = {{"value", tob::io::to_json(against->value)}, {"attained_by", against->attained_by},
                             {"argmin", against->argmin}};
        json rows = json::array();
        for (std::size_t k = 0; k < utob.size(); ++k)
            rows.push_back({{"eps", cfg.eps[k]},
                            {"verdict", utob[k].verdict},
                            {"witness_size", utob[k].witness.size()},
                            {"defect", tob::io::to_json(utob[k].defect.value)},
                            {"witness", tob::io::to_json(utob[k].witness)}});
        out["utob"] = rows;
        std::cout << out.dump(2) << "\n";
        return ok;
    }
    std::cout << "tobcheck " << TOB_VERSION << " tob " << cfg.input << "\n"
              << "|M| = " << in.M.size() << " over " << n << " points\n";
    if (against) {
        std::cout << "\ndefect(M, F), |F| = " << in.F->size() << ":\n";
        for (std::size_t w = 0; w < n; ++w)
            std::cout << "  " << std::setw(8) << labels.label(w) << "  " << fmt(against->value[w]) << "  (element "
                      << against->attained_by[w] << ")\n";
    }
    std::cout << "\nuniform total order-boundedness:\n";
    for (std::size_t k = 0; k < utob.size(); ++k)
        std::cout << "  eps " << fmt(cfg.eps[k]) << ": " << (utob[k].verdict ? "yes" : "no") << ", witness of size "
                  << utob[k].witness.size() << ", defect " << fmt(utob[k].defect.value) << "\n";
    return ok;
}

int cmd_zonotope(const Config& cfg) {
    const auto doc = load(cfg.input);
    const auto in = tob::io::read_set_input(doc);
    if (!in.F) tob::io::Node(doc).fail("the zonotope command needs generators under key 'F'");
    const tob::SolverOptions so{cfg.solver_tol, cfg.max_iter};
    const tob::Zonotope Z{*in.F};
    std::vector<tob::ZonotopeDistance> dist;
    for (const auto& x : in.M) dist.push_back(tob::zonotope_distance(x, Z, so));
    std::vector<tob::CpCheckReport> cp;
    for (double e : cfg.eps) cp.push_back(tob::cp_check(in.M, *in.F, e, so));
    const auto& labels = in.points;
    const std::size_t n = in.space.points();

    if (cfg.format == "csv") {
        std::cout << "element,point,distance,error_bound,iterations\n";
        for (std::size_t i = 0; i < dist.size(); ++i)
            for (std::size_t w = 0; w < n; ++w)
                std::cout << i << "," << labels.label(w) << "," << full(dist[i].value[w]) << "," << full(dist[i].error_bound[w])
                          << "," << dist[i].iterations[w] << "\n";
        return ok;
    }
    if (cfg.format == "json") {
        auto out = header(cfg);
        out["points"] = tob::io::to_json(labels);
        json elems = json::array();
        for (std::size_t i = 0; i < dist.size(); ++i) {
            json lambda = json::array();
            for (const auto& l : dist[i].lambda) {
                json row = json::array();
                for (std::size_t w = 0; w < n; ++w) row.push_back(tob::io::to_json(l[w]));
                lambda.push_back(row);
            }
            elems.push_back({{"index", i},
                             {"distance", tob::io::to_json(dist[i].value)},
                             {"error_bound", tob::io::to_json(dist[i].error_bound)},
                             {"iterations", dist[i].iterations},
                             {"coefficients", lambda}});
        }
        out["elements"] = elems;
        json verdicts = json::array();
        for (std::size_t k = 0; k < cp.size(); ++k) {
            json v{{"eps", cfg.eps[k]}, {"passed", cp[k].passed}};
            v["first_violation"] = cp[k].first_violation ? json(*cp[k].first_violation) : json(nullptr);
            verdicts.push_back(v);
        }
        out["cp"] = verdicts;
        std::cout << out.dump(2) << "\n";
        return ok;
    }
    std::cout << "tobcheck " << TOB_VERSION << " zonotope " << cfg.input << "\n"
              << "|M| = " << in.M.size() << ", " << in.F->size() << " generators, " << n << " points\n\n"
              << "distance to the zonotope:\n";
    for (std::size_t i = 0; i < dist.size(); ++i) {
        std::size_t iters = 0;
        for (auto t : dist[i].iterations) iters = std::max(iters, t);
        std::cout << "  element " << i << ": " << fmt(dist[i].value) << "  gap <= "
                  << fmt(tob::sup_norm(dist[i].error_bound)) << ", " << iters << " iterations\n";
    }
    std::cout << "\ncontained in Z_F + B[0; eps]:\n";
    for (std::size_t k = 0; k < cp.size(); ++k) {
        std::cout << "  eps " << fmt(cfg.eps[k]) << ": " << (cp[k].passed ? "yes" : "no");
        if (cp[k].first_violation) std::cout << " (first violation: element " << *cp[k].first_violation << ")";
        std::cout << "\n";
    }
    return ok;
}

int cmd_cyclic(const Config& cfg) {
    const auto doc = load(cfg.input);
    const auto in = tob::io::read_set_input(doc);
    const double bound = tob::sup_norm(tob::sup_lattice_norm(in.M));
    const double r = in.radius.value_or(bound > 0 ? bound : 1.0);
    if (r < bound - cfg.tol)
        tob::io::Node(doc).at("radius").fail("radius " + fmt(r) + " is below the largest element norm " + fmt(bound));

    bool passed = true;
    json rows = json::array();
    std::ostringstream csv, text;
    csv << "eps,part,cardinality,support_size,generators\n";
    for (double e : cfg.eps) {
        const auto w = tob::cyclic_witness(in.M, e, r, cfg.tol);
        const auto v = tob::verify_cyclic(in.M, e, w, cfg.tol);
        passed = passed && v.passed;
        rows.push_back({{"eps", e},
                        {"passed", v.passed},
                        {"failure", v.failure},
                        {"localized_defect", v.localized_defect ? tob::io::to_json(*v.localized_defect) : json(nullptr)},
                        {"witness", tob::io::to_json(w, in.points)}});
        text << "  eps " << fmt(e) << ": " << (v.passed ? "verified" : "FAILED: " + v.failure) << "\n";
        for (std::size_t k = 0; k < w.parts.size(); ++k) {
            const auto& p = w.parts[k];
            csv << e << "," << k << "," << p.cardinality << "," << p.q.count() << "," << p.generators.size() << "\n";
            text << "    part " << k << ": cardinality " << p.cardinality << " on " << p.q.count() << " points\n";
        }
    }
    if (cfg.format == "csv") {
        std::cout << csv.str();
    } else if (cfg.format == "json") {
        auto out = header(cfg);
        out["radius"] = r;
        out["results"] = rows;
        out["passed"] = passed;
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "tobcheck " << TOB_VERSION << " cyclic " << cfg.input << "\n"
                  << "|M| = " << in.M.size() << ", radius " << fmt(r) << "\n"
                  << text.str() << "result: " << (passed ? "PASS" : "FAIL") << "\n";
    }
    return passed ? ok : check_failed;
}

// ---------------------------------------------------------------------------
// counterexample / selftest
// ---------------------------------------------------------------------------

int cmd_counterexample(Config cfg, bool delta_given) {
    if (!cfg.input.empty()) {
        const auto in = tob::io::read_seq_input(load(cfg.input));
        if (cfg.n == 0) cfg.n = in.n;
        if (!in.delta.empty() && !delta_given) cfg.delta = in.delta;
    }
    if (cfg.n == 0) throw tob::ArgumentError("counterexample: give --n or an input file");
    if (cfg.format == "csv") {
        std::cout << tob::seq::defect_table_csv(cfg.n);
        return ok;
    }
    const auto c = tob::seq::build_counterexample(cfg.n);
    bool passed = true;
    json rows = json::array(), bounds = json::array(), witnesses = json::array(), egoroff = json::array();
    for (std::size_t k = 1; k <= cfg.n; ++k) {
        const auto b = tob::seq::verify_tob_bound(c, k, cfg.tol);
        passed = passed && b.passed();
        rows.push_back({{"n", k}, {"defect", tob::io::to_json(b.defect)}});
        bounds.push_back({{"n", k}, {"zero_on_prefix", b.zero_on_prefix}, {"bounded_beyond", b.bounded_beyond}});
    }
    for (std::size_t d = 1; d < cfg.n; ++d) {
        const auto w = tob::seq::verify_not_utob(c.model, c.nets[d]);
        passed = passed && w.distance >= tob::seq::sqrt2 / 2 - cfg.tol;
        witnesses.push_back({{"net", d}, {"coordinate", w.coordinate}, {"basis", w.basis}, {"distance", w.distance}});
    }
    for (double d : cfg.delta) {
        try {
            const auto e = tob::seq::egoroff_demo(cfg.n, d, cfg.tol);
            passed = passed && e.utob;
            egoroff.push_back({{"delta", d}, {"m", e.m}, {"removed_mass", e.removed_mass}, {"utob", e.utob}});
        } catch (const tob::InfeasibleError& e) {
            egoroff.push_back({{"delta", d}, {"infeasible", e.what()}});
        }
    }
    if (cfg.format == "json") {
        auto out = header(cfg);
        out["points"] = tob::io::to_json(c.model.points());
        out["table"] = rows;
        out["bounds"] = bounds;
        out["not_utob"] = witnesses;
        out["egoroff"] = egoroff;
        out["passed"] = passed;
        std::cout << out.dump(2) << "\n";
        return passed ? ok : check_failed;
    }
    std::cout << "tobcheck " << TOB_VERSION << " counterexample, N = " << cfg.n << "\n\ndefect(M, F_n):\n"
              << tob::seq::defect_table_csv(cfg.n) << "\nnets F_d miss the family:\n";
    for (const auto& w : witnesses)
        std::cout << "  d = " << w["net"] << ": coordinate " << w["coordinate"] << ", basis vector " << w["basis"]
                  << ", distance " << fmt(w["distance"].get<double>()) << "\n";
    std::cout << "\nlocalization:\n";
    for (const auto& e : egoroff) {
        std::cout << "  delta " << fmt(e["delta"].get<double>()) << ": ";
        if (e.contains("infeasible"))
            std::cout << e["infeasible"].get<std::string>() << "\n";
        else
            std::cout << "A = {1.." << e["m"] << "}, removed mass " << fmt(e["removed_mass"].get<double>())
                      << (e["utob"].get<bool>() ? ", uniformly totally order-bounded" : ", not localized") << "\n";
    }
    std::cout << "result: " << (passed ? "PASS" : "FAIL") << "\n";
    return passed ? ok : check_failed;
}

int cmd_selftest(const Config& cfg) {
    tob::selftest::Options opt;
    opt.seed = cfg.seed;
    opt.tol = cfg.tol;
    opt.inject_fault = cfg.inject_fault;
    opt.zonotope_grid = oracle::two_generator_grid;
    const auto results = tob::selftest::run_all(opt);
    bool passed = true;
    for (const auto& r : results) passed = passed && r.passed;
    if (cfg.format == "json") {
        auto out = header(cfg);
        json rows = json::array();
        for (const auto& r : results)
            rows.push_back({{"id", r.id},
                            {"name", r.name},
                            {"passed", r.passed},
                            {"checks", r.checks},
                            {"seconds", r.seconds},
                            {"budget", r.budget},
                            {"detail", r.detail}});
        out["criteria"] = rows;
        out["passed"] = passed;
        std::cout << out.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        std::cout << "id,name,passed,checks,seconds,budget\n";
        for (const auto& r : results)
            std::cout << r.id << "," << r.name << "," << (r.passed ? "true" : "false") << "," << r.checks << ","
                      << r.seconds << "," << r.budget << "\n";
    } else {
        std::cout << "tobcheck " << TOB_VERSION << " selftest, seed " << cfg.seed << "\n";
        for (const auto& r : results) std::cout << tob::selftest::format(r) << "\n";
        std::cout << "result: " << (passed ? "PASS" : "FAIL") << "\n";
    }
    return passed ? ok : check_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Order-boundedness and compact-extension checks on finite models"};
    app.set_version_flag("--version", std::string("tobcheck ") + TOB_VERSION);
    app.require_subcommand(1);

    Config cfg;
    const auto positive = CLI::PositiveNumber;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--tol", cfg.tol, "comparison tolerance")->check(positive)->capture_default_str();
        sub->add_option("--format", cfg.format, "output format")
            ->check(CLI::IsMember({"text", "json", "csv"}))
            ->capture_default_str();
    };
    auto grids = [&](CLI::App* sub) {
        sub->add_option("--eps", cfg.eps, "eps grid")->check(positive)->delimiter(',')->capture_default_str();
    };
    auto with_input = [&](CLI::App* sub) {
        sub->add_option("input,--input", cfg.input, "input JSON file")->required();
    };

    auto* analyze = app.add_subcommand("analyze", "analyze a finite measure-preserving extension");
    with_input(analyze);
    common(analyze);
    grids(analyze);
    analyze->add_option("--delta", cfg.delta, "delta grid")->check(positive)->delimiter(',')->capture_default_str();
    analyze->add_option("--cap", cfg.cap, "maximum group size")->check(CLI::PositiveNumber)->capture_default_str();

    auto* tob_cmd = app.add_subcommand("tob", "defect tables and uniform total order-boundedness");
    with_input(tob_cmd);
    common(tob_cmd);
    grids(tob_cmd);

    auto* zono = app.add_subcommand("zonotope", "distances to a zonotope and containment verdicts");
    with_input(zono);
    common(zono);
    grids(zono);
    zono->add_option("--solver-tol", cfg.solver_tol, "certified duality gap")->check(positive)->capture_default_str();
    zono->add_option("--max-iter", cfg.max_iter, "iteration limit per point")->check(CLI::PositiveNumber)->capture_default_str();

    auto* cyclic = app.add_subcommand("cyclic", "cyclic compactness witnesses");
    with_input(cyclic);
    common(cyclic);
    grids(cyclic);

    auto* counter = app.add_subcommand("counterexample", "order-bounded but not uniformly order-bounded sequences");
    counter->add_option("--n", cfg.n, "number of coordinates")->check(CLI::Range(std::size_t{2}, std::size_t{4096}));
    counter->add_option("--input", cfg.input, "sequence-model JSON file");
    common(counter);
    auto* delta_opt = counter->add_option("--delta", cfg.delta, "delta grid")->check(positive)->delimiter(',')->capture_default_str();

    auto* selftest = app.add_subcommand("selftest", "run the randomized property suite");
    selftest->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    selftest->add_flag("--inject-fault", cfg.inject_fault, "replace one extension by a broken one");
    common(selftest);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : schema;
    }
    if (counter->parsed() && cfg.format == "text" && counter->count("--format") == 0) cfg.format = "csv";

    try {
        for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
        if (cfg.command == "analyze") return cmd_analyze(cfg);
        if (cfg.command == "tob") return cmd_tob(cfg);
        if (cfg.command == "zonotope") return cmd_zonotope(cfg);
        if (cfg.command == "cyclic") return cmd_cyclic(cfg);
        if (cfg.command == "counterexample") return cmd_counterexample(cfg, delta_opt->count() > 0);
        if (cfg.command == "selftest") return cmd_selftest(cfg);
    } catch (const tob::io::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return schema;
    } catch (const tob::CapExceededError& e) {
        std::cerr << "cap exceeded: " << e.what() << " (cap " << e.cap() << ")\n";
        return cap_exceeded;
    } catch (const tob::IterationLimitError& e) {
        std::cerr << "solver limit: " << e.what() << "\n";
        std::cerr << "best distances:";
        for (double v : e.best()) std::cerr << " " << v;
        std::cerr << "\ngap bounds:";
        for (double v : e.bound()) std::cerr << " " << v;
        std::cerr << "\n";
        return solver_limit;
    } catch (const tob::InvalidExtensionError& e) {
        std::cerr << "invalid extension: " << e.what() << "\n";
        return schema;
    } catch (const tob::ArgumentError& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return schema;
    } catch (const tob::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return check_failed;
    }
    return ok;
}
