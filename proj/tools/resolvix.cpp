#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "resolvix/generic.hpp"
#include "resolvix/interval_partition.hpp"
#include "resolvix/poset_io.hpp"
#include "resolvix/resolve.hpp"
#include "resolvix/space.hpp"

using json = nlohmann::ordered_json;
using namespace resolvix;

namespace {

struct PropertyViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingFile : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spill(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MissingFile("cannot write " + path);
    out << body;
}

struct Globals {
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    std::string report;  // write JSON here instead of stdout
};

std::uint64_t effective_seed(const Globals& g) {
    if (const char* env = std::getenv("RESOLVIX_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            fail(ErrorKind::ParseError, std::string("RESOLVIX_SEED is not an integer: ") + env);
        }
    }
    return g.seed;
}

json header(const std::string& verb, const json& config) {
    json j;
    j["tool"] = "resolvix";
    j["version"] = kVersion;
    j["verb"] = verb;
    j["config"] = config;
    return j;
}

std::vector<std::string> names_of(const family::SetFamily& F, const family::Sub& s) {
    std::vector<std::string> v;
    for (auto i : s) v.push_back(F[i].name);
    return v;
}

std::unique_ptr<order::LazyPoset> lazy_by_name(const std::string& spec) {
    if (spec == "chain") return std::make_unique<order::ChainPoset>();
    if (spec == "tree2") return std::make_unique<order::Tree2Poset>();
    if (spec == "grid") return std::make_unique<order::GridPoset>();
    return std::make_unique<order::FiniteLazy>(order::parse_poset(slurp(spec)).poset, "file");
}

// `partition <name>` then `<id> <color>` lines.
std::map<std::string, int> parse_partition(std::string_view src) {
    std::map<std::string, int> out;
    bool header = false;
    for (auto& [ln, line] : text::logical_lines(src)) {
        auto tok = text::split_ws(line);
        if (tok[0] == "partition") {
            header = true;
            continue;
        }
        if (tok.size() != 2) fail(ErrorKind::ParseError, "line " + std::to_string(ln) + ": expected '<id> <color>'");
        auto c = text::parse_int(tok[1], ln);
        if (c != 0 && c != 1) fail(ErrorKind::ParseError, "line " + std::to_string(ln) + ": color must be 0 or 1");
        if (!out.emplace(tok[0], static_cast<int>(c)).second)
            fail(ErrorKind::ParseError, "line " + std::to_string(ln) + ": duplicate id " + tok[0]);
    }
    if (!header) fail(ErrorKind::ParseError, "missing 'partition <name>' header");
    return out;
}

json certs_json(const family::SetFamily& F, const std::vector<family::FillCertificate>& cs) {
    json a = json::array();
    for (auto& c : cs) {
        json e;
        e["target"] = c.target ? F[*c.target].name : std::string("-");
        e["witnesses"] = names_of(F, c.witnesses);
        e["frontier_points"] = family::mask_names(F, c.via_frontier);
        a.push_back(e);
    }
    return a;
}

json elem_json(const grid::GridElem& e) { return grid::to_string(e); }

json quad_json(const forcing::Quad& q) {
    return {{"x", elem_json(q.x)}, {"y", elem_json(q.y)}, {"z", elem_json(q.z)}, {"w", elem_json(q.w)},
            {"low_empty", q.low_empty}, {"high_empty", q.high_empty}};
}

// ---------------------------------------------------------------- verbs

json do_stone(const std::string& poset, std::size_t steps, std::uint64_t seed) {
    auto L = lazy_by_name(poset);
    auto sp = order::stone_partition(*L, steps, seed);
    json j = header("stone", {{"poset", poset}, {"steps", steps}, {"seed", seed}});
    json col = json::array();
    for (auto& [id, c] : sp.colored) col.push_back({L->name(id), c});
    j["processed"] = sp.processed;
    j["colored"] = col;
    if (auto v = order::stone_violation(*L, sp)) {
        j["violation"] = L->name(*v);
        throw PropertyViolation(j.dump(2));
    }
    j["violation"] = nullptr;
    return j;
}

json do_resolve(const std::string& path, std::size_t window) {
    auto F = family::parse_family(slurp(path));
    if (F.ground().size() > window)
        fail(ErrorKind::PreconditionFailed, "ground has " + std::to_string(F.ground().size()) + " points, window is " +
                                                std::to_string(window));
    auto local = family::find_local_pairs(F);
    auto res = family::resolve_good_pair_greedy(F, local);
    json j = header("resolve", {{"family", path}, {"window", window}});
    family::Sub sides[2];
    for (std::size_t i = 0; i < F.size(); ++i) sides[res.side[i]].push_back(i);
    j["side0"] = names_of(F, sides[0]);
    j["side1"] = names_of(F, sides[1]);
    j["certificates0"] = certs_json(F, res.certificates[0]);
    j["certificates1"] = certs_json(F, res.certificates[1]);
    if (!family::is_good_pair(F, {sides[0], sides[1]})) throw PropertyViolation(j.dump(2));
    return j;
}

json do_negligible(const std::string& path, std::size_t target) {
    auto F = family::parse_family(slurp(path));
    auto U = family::extract_negligible(F, target);
    json j = header("negligible", {{"family", path}, {"target", target}});
    j["negligible"] = names_of(F, U);
    auto rest = family::sub_minus(F.all(), U);
    j["rest_fills"] = family::fills_ok(F, rest, F.all());
    if (!j["rest_fills"].get<bool>()) throw PropertyViolation(j.dump(2));
    return j;
}

json do_finunion(unsigned bits) {
    auto B = family::dyadic_union_closed(bits);
    const family::Mask U = B.window();
    std::vector<family::Mask> chain;
    std::vector<std::size_t> ys;
    for (std::size_t n = 0; n < B.points; ++n) {
        chain.push_back(U & ~((family::Mask{1} << n) - 1));
        if (n > 0) ys.push_back(n - 1);
    }
    auto r = family::resolve_finite_union_closed(B, U, chain, ys);
    json j = header("finunion", json::object({{"bits", bits}, {"points", B.points}}));
    for (int s = 0; s < 2; ++s) {
        j["side" + std::to_string(s)] = r.side[s];
        j["truncated" + std::to_string(s)] = r.truncated[s];
    }
    json cs = json::array();
    for (auto& c : r.certificates)
        cs.push_back(json::object({{"target", c.target}, {"point", c.point}, {"level", c.level}, {"W", c.W}, {"filler", c.filler}}));
    j["certificates"] = cs;
    family::Mask u0 = 0, u1 = 0;
    for (auto m : r.side[0]) u0 |= m;
    for (auto m : r.side[1]) u1 |= m;
    j["unions_cover"] = u0 == U && u1 == U;
    if (!j["unions_cover"].get<bool>()) throw PropertyViolation(j.dump(2));
    return j;
}

json do_cohen(const std::string& path, std::uint64_t seed) {
    auto F = family::parse_family(slurp(path));
    auto r = family::cohen_good_pair(F, seed);
    json j = header("cohen", {{"family", path}, {"seed", seed}});
    j["left"] = names_of(F, r.pair.left);
    j["right"] = names_of(F, r.pair.right);
    j["requirements"] = r.requirements;
    j["met_by_frontier"] = r.met_by_frontier;
    return j;
}

json do_ik_check(const std::string& poset_path, const std::string& part_path, std::size_t threshold, std::uint64_t seed) {
    auto np = order::parse_poset(slurp(poset_path));
    const auto& P = np.poset;
    json j = header("ik-check", {{"poset", poset_path}, {"partition", part_path}, {"threshold", threshold}, {"seed", seed}});
    order::Coloring col;
    if (part_path.empty()) {
        auto ap = order::build_avoiding_partition(P, seed, threshold);
        col = ap.color;
        j["built"] = true;
        j["antichains_added"] = {ap.antichains_added[0], ap.antichains_added[1]};
        auto chk = order::check_avoiding_partition(P, ap);
        j["check"] = chk.ok ? "ok" : chk.detail;
    } else {
        auto m = parse_partition(slurp(part_path));
        col.assign(P.size(), -1);
        for (auto& [id, c] : m) {
            auto i = P.find(id);
            if (!i) fail(ErrorKind::PreconditionFailed, "partition names unknown element " + id);
            col[*i] = c;
        }
        for (std::size_t i = 0; i < P.size(); ++i)
            if (col[i] < 0) fail(ErrorKind::PreconditionFailed, "partition misses " + P.name(i));
        j["built"] = false;
    }
    json cj = json::object();
    for (std::size_t i = 0; i < P.size(); ++i) cj[P.name(i)] = col[i];
    j["coloring"] = cj;
    auto s = order::find_homogeneous_chain(P, col, threshold);
    j["examined"] = s.examined;
    if (s.witness) {
        std::vector<std::string> ch;
        for (auto c : s.witness->chain) ch.push_back(P.name(c));
        j["witness"] = {{"color", s.witness->color}, {"chain", ch}};
    } else {
        j["witness"] = nullptr;
    }
    if (j["built"].get<bool>() && j["check"] != "ok") throw PropertyViolation(j.dump(2));
    return j;
}

json do_build_grid(const grid::BuildConfig& cfg, const std::string& out) {
    grid::Builder B(cfg);
    json j = header("build-grid", {{"stages", cfg.stages}, {"block", cfg.block}, {"graft", cfg.graft},
                                   {"coloring", cfg.coloring == grid::ColoringKind::Identity ? "identity" : "seeded"},
                                   {"seed", cfg.seed}});
    json st = json::array();
    for (auto& r : B.stages())
        st.push_back({{"alpha", r.alpha}, {"y", elem_json(B.elem(r.y))}, {"w", elem_json(B.elem(r.w))},
                      {"t", elem_json(B.elem(r.t))}, {"k", r.k}, {"grafted", r.grafted.size()}});
    j["elements"] = B.size();
    j["stages"] = st;
    auto rep = grid::check_builder(B);
    j["invariants"] = rep.ok ? "ok" : rep.detail;
    if (!out.empty()) spill(out, order::write_poset("grid-builder", B.poset()));
    if (!rep.ok) throw PropertyViolation(j.dump(2));
    return j;
}

forcing::Condition load_condition(const std::string& path) { return forcing::parse_condition(slurp(path)); }

json violations_json(const std::vector<forcing::Violation>& vs) {
    json a = json::array();
    for (auto& v : vs) a.push_back({{"clause", v.clause}, {"detail", v.detail}});
    return a;
}

json do_forcing(const std::string& op, const std::string& p_path, const std::string& q_path, const std::string& spec,
                const std::string& sched_path, std::size_t budget, std::uint64_t seed, const std::string& out) {
    json j = header("forcing " + op, {{"p", p_path}, {"q", q_path}, {"spec", spec}, {"schedule", sched_path},
                                      {"budget", budget}, {"seed", seed}});
    if (op == "validate") {
        auto vs = forcing::validate(load_condition(p_path));
        j["valid"] = vs.empty();
        j["violations"] = violations_json(vs);
        if (!vs.empty()) throw PropertyViolation(j.dump(2));
    } else if (op == "leq") {
        auto v = forcing::leq(load_condition(p_path), load_condition(q_path));
        j["leq"] = !v;
        j["violation"] = v ? json{{"clause", v->clause}, {"detail", v->detail}} : json(nullptr);
        if (v) throw PropertyViolation(j.dump(2));
    } else if (op == "oplus") {
        auto p = load_condition(p_path), q = load_condition(q_path);
        if (auto why = forcing::twin_failure(p, q)) fail(ErrorKind::NotTwins, *why);
        auto r = forcing::oplus(p, q);
        j["result"] = forcing::write_condition(r, "oplus");
        if (!out.empty()) spill(out, forcing::write_condition(r, "oplus"));
    } else if (op == "extend") {
        auto p = load_condition(p_path);
        auto sch = forcing::parse_schedule("schedule one\n" + spec + "\n");
        auto r = forcing::apply_spec(p, sch.specs.at(0), 0, seed, {});
        j["result"] = forcing::write_condition(r, "extended");
        if (auto v = forcing::leq(r, p)) {
            j["violation"] = {{"clause", v->clause}, {"detail", v->detail}};
            throw PropertyViolation(j.dump(2));
        }
        if (!out.empty()) spill(out, forcing::write_condition(r, "extended"));
    } else if (op == "run") {
        auto sch = forcing::parse_schedule(slurp(sched_path));
        auto log = forcing::generic_run(sch, budget, seed);
        j["met"] = log.met;
        json g5 = json::array();
        for (auto& g : log.g5)
            g5.push_back({{"alpha", g.alpha}, {"beta", g.beta}, {"qa", quad_json(g.qa)}, {"qb", quad_json(g.qb)},
                          {"t", elem_json(g.t)}});
        j["amalgamations"] = g5;
        json thin = json::array();
        for (auto& t : log.thin_nodes) thin.push_back({{"tree", t.alpha}, {"node", elem_json(t.node)}, {"children", t.children}});
        j["thin_nodes"] = thin;
        j["fragment"] = forcing::write_condition(log.fragment, "fragment");
        if (!out.empty()) spill(out, forcing::write_condition(log.fragment, "fragment"));
    } else {
        fail(ErrorKind::InvalidArgument, "unknown forcing operation '" + op + "'");
    }
    return j;
}

json do_space_check(const std::string& frag_path, const std::string& checks, const std::string& part_path) {
    auto p = load_condition(frag_path);
    auto bs = space::branches(p);
    json j = header("space check", {{"fragment", frag_path}, {"checks", checks}, {"partition", part_path}});
    json br = json::array();
    for (auto& b : bs) {
        std::vector<std::string> stem;
        for (auto& e : b.stem) stem.push_back(grid::to_string(e));
        br.push_back({{"tree", b.alpha}, {"stem", stem}, {"maximal", b.maximal}});
    }
    j["branches"] = br;
    bool violated = false;
    std::string spaced = checks;
    std::replace(spaced.begin(), spaced.end(), ',', ' ');
    const auto list = text::split_ws(spaced);
    const std::set<std::string> want(list.begin(), list.end());
    json res = json::object();
    if (want.count("g1")) {
        json a = json::array();
        for (auto& u : p.A)
            for (auto& v : p.A) {
                if (u == v) continue;
                auto r = space::check_g1(p, bs, u, v);
                if (r.status == space::Status::Violation) violated = true;
                a.push_back({{"u", elem_json(u)}, {"v", elem_json(v)}, {"status", space::to_string(r.status)},
                             {"branch", r.branch ? json(*r.branch) : json(nullptr)}});
            }
        res["g1"] = a;
    }
    if (want.count("g3")) {
        json a = json::array();
        for (std::size_t i = 0; i < bs.size(); ++i)
            for (std::size_t k = i + 1; k < bs.size(); ++k) {
                auto w = space::check_hausdorff(p, bs[i], bs[k]);
                if (w.status == space::Status::Violation) violated = true;
                a.push_back({{"b", i}, {"c", k}, {"status", space::to_string(w.status)},
                             {"x", w.x ? elem_json(*w.x) : json(nullptr)}, {"y", w.y ? elem_json(*w.y) : json(nullptr)},
                             {"note", w.note}});
            }
        res["g3"] = a;
    }
    if (want.count("g4")) {
        json a = json::array();
        for (auto& [key, lv] : p.g) {
            for (std::size_t i = 0; i < bs.size(); ++i) {
                if (bs[i].alpha != key.second || space::member(p, bs[i], key.first) != space::Determination::Out) continue;
                auto w = space::check_clopen(p, bs[i], key.first);
                if (w.status == space::Status::Violation) violated = true;
                a.push_back({{"x", elem_json(key.first)}, {"b", i}, {"status", space::to_string(w.status)},
                             {"y", w.y ? elem_json(*w.y) : json(nullptr)}, {"note", w.note}});
            }
        }
        res["g4"] = a;
    }
    if (want.count("g5")) {
        if (part_path.empty()) fail(ErrorKind::PreconditionFailed, "g5 needs --partition");
        auto m = parse_partition(slurp(part_path));
        for (auto& x : p.A)
            if (!m.count(grid::to_string(x))) fail(ErrorKind::PreconditionFailed, "partition misses " + grid::to_string(x));
        auto rep = space::irresolvability_game(p, [&](const grid::GridElem& x) { return m.at(grid::to_string(x)); });
        json hits = json::array();
        for (auto& h : rep.hits)
            hits.push_back({{"alpha", h.alpha}, {"beta", h.beta}, {"qa", quad_json(h.qa)}, {"qb", quad_json(h.qb)},
                            {"t", elem_json(h.t)}, {"contradicted_color", h.contradicted}});
        res["g5"] = {{"pairs", rep.pairs_examined}, {"hits", hits}, {"degenerate", rep.degenerate}};
    }
    j["checks"] = res;
    if (violated) throw PropertyViolation(j.dump(2));
    return j;
}

json do_quotient(const std::string& path, const std::string& out) {
    auto F = family::parse_family(slurp(path));
    auto q = space::kolmogorov_quotient(F);
    json j = header("quotient", {{"family", path}});
    json pm = json::object();
    for (std::size_t x = 0; x < F.ground().size(); ++x) pm[F.ground()[x]] = q.family.ground()[static_cast<std::size_t>(q.point_class[x])];
    j["point_map"] = pm;
    j["classes"] = q.family.ground().size();
    j["quotient"] = family::write_family(q.family);
    j["properties"] = q.check.ok ? "ok" : "property " + std::to_string(q.check.property) + ": " + q.check.detail;
    if (!out.empty()) spill(out, family::write_family(q.family));
    if (!q.check.ok) throw PropertyViolation(j.dump(2));
    return j;
}

void emit(const Globals& g, const json& j) {
    if (g.report.empty())
        std::cout << j.dump(2) << "\n";
    else
        spill(g.report, j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"resolvix: finite experiments on base resolvability"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "RNG seed (RESOLVIX_SEED overrides)");
    app.add_option("--jobs", g.jobs, "worker threads; the current verbs are sequential")->check(CLI::PositiveNumber);
    app.add_option("--report", g.report, "write the JSON report to this file");
    app.set_version_flag("--version", std::string(kVersion));

    std::function<json()> run;

    std::string poset = "chain", family_path, part_path, p_path, q_path, spec, sched_path, out, checks = "g1,g3,g4,g5";
    std::size_t steps = 1000, window = 64, target = 4, threshold = 3, budget = 100;
    unsigned bits = 4;

    auto* stone = app.add_subcommand("stone", "cofinal 2-partition of a lazy poset");
    stone->add_option("--poset", poset, "chain | tree2 | grid | poset file");
    stone->add_option("--steps", steps);
    stone->callback([&] { run = [&] { return do_stone(poset, steps, effective_seed(g)); }; });

    auto* resolve = app.add_subcommand("resolve", "split a family into a good pair");
    resolve->add_option("--family", family_path)->required();
    resolve->add_option("--window", window);
    resolve->callback([&] { run = [&] { return do_resolve(family_path, window); }; });

    auto* negl = app.add_subcommand("negligible", "extract a negligible subfamily");
    negl->add_option("--family", family_path)->required();
    negl->add_option("--target", target);
    negl->callback([&] { run = [&] { return do_negligible(family_path, target); }; });

    auto* finu = app.add_subcommand("finunion", "split the union-closed dyadic family");
    finu->add_option("--bits", bits)->check(CLI::Range(1u, 4u));
    finu->callback([&] { run = [&] { return do_finunion(bits); }; });

    auto* cohen = app.add_subcommand("cohen", "seeded coloring meeting the fill requirements");
    cohen->add_option("--family", family_path)->required();
    cohen->callback([&] { run = [&] { return do_cohen(family_path, effective_seed(g)); }; });

    auto* ik = app.add_subcommand("ik-check", "homogeneous chain search, or build an avoiding partition");
    ik->add_option("--poset", poset)->required();
    ik->add_option("--partition", part_path);
    ik->add_option("--threshold", threshold);
    ik->callback([&] { run = [&] { return do_ik_check(poset, part_path, threshold, effective_seed(g)); }; });

    grid::BuildConfig cfg;
    std::string coloring = "identity";
    auto* bg = app.add_subcommand("build-grid", "staged grid construction");
    bg->add_option("--stages", cfg.stages);
    bg->add_option("--block", cfg.block);
    bg->add_option("--graft", cfg.graft);
    bg->add_option("--coloring", coloring)->check(CLI::IsMember({"identity", "seeded"}));
    bg->add_option("--out", out, "write the poset file here");
    bg->callback([&] {
        run = [&] {
            cfg.coloring = coloring == "identity" ? grid::ColoringKind::Identity : grid::ColoringKind::Seeded;
            cfg.seed = effective_seed(g);
            return do_build_grid(cfg, out);
        };
    });

    auto* forc = app.add_subcommand("forcing", "finite conditions");
    forc->require_subcommand(1);
    forc->fallthrough();
    for (std::string op : {"validate", "leq", "oplus", "extend", "run"}) {
        auto* sc = forc->add_subcommand(op);
        if (op != "run") sc->add_option("--p,--condition", p_path)->required();
        if (op == "leq" || op == "oplus") sc->add_option("--q", q_path)->required();
        if (op == "extend") sc->add_option("--spec", spec, "one schedule line, e.g. 'add-point (1,0) 10'")->required();
        if (op == "run") {
            sc->add_option("--schedule", sched_path)->required();
            sc->add_option("--budget", budget);
        }
        if (op != "validate" && op != "leq") sc->add_option("--out", out);
        sc->callback([&, op] {
            run = [&, op] { return do_forcing(op, p_path, q_path, spec, sched_path, budget, effective_seed(g), out); };
        });
    }

    auto* sp = app.add_subcommand("space", "branch-space checks on a fragment");
    sp->require_subcommand(1);
    sp->fallthrough();
    auto* spc = sp->add_subcommand("check");
    spc->add_option("--fragment", p_path)->required();
    spc->add_option("--checks", checks);
    spc->add_option("--partition", part_path);
    spc->callback([&] { run = [&] { return do_space_check(p_path, checks, part_path); }; });

    auto* quo = app.add_subcommand("quotient", "Kolmogorov quotient of a family");
    quo->add_option("--family", family_path)->required();
    quo->add_option("--out", out);
    quo->callback([&] { run = [&] { return do_quotient(family_path, out); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    try {
        emit(g, run());
        return 0;
    } catch (const PropertyViolation& v) {
        std::cout << v.what() << "\n";
        return 3;
    } catch (const MissingFile& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::ParseError ? 1 : 2;
    }
}
