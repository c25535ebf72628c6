#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "opsem/transform.hpp"

using namespace opsem::xf;

namespace {

XPtr S(const std::string& s) {
    auto r = parse_src(s);
    REQUIRE_MESSAGE(r.term, s << " :: " << r.error);
    return *r.term;
}

// Random closed source terms. Applications are built arity-correct by
// construction (apply a known lambda of the arity we are supplying).
struct SrcGen {
    std::mt19937 rng;
    int next_var = 0;

    XPtr value(std::vector<std::string>& scope, int depth) {
        if (!scope.empty() && (depth <= 0 || rng() % 3 == 0))
            return XTerm::var(scope[rng() % scope.size()]);
        if (depth <= 0) return XTerm::tuple({});
        if (rng() % 3 == 0) {
            std::vector<XPtr> items;
            for (unsigned k = rng() % 3; k-- > 0;) items.push_back(value(scope, depth - 1));
            return XTerm::tuple(std::move(items));
        }
        unsigned arity = 1 + rng() % 2;
        std::vector<std::string> ps;
        for (unsigned k = 0; k < arity; ++k) ps.push_back("a" + std::to_string(next_var++));
        for (const auto& p : ps) scope.push_back(p);
        XPtr body = term(scope, depth - 1);
        scope.resize(scope.size() - ps.size());
        return XTerm::lam(std::move(ps), body);
    }

    XPtr term(std::vector<std::string>& scope, int depth) {
        switch (depth <= 0 ? 0u : rng() % 5) {
            case 0: return value(scope, depth);
            case 1: {  // application of a lambda we build, so arity matches
                unsigned arity = 1 + rng() % 2;
                std::vector<std::string> ps;
                for (unsigned k = 0; k < arity; ++k) ps.push_back("a" + std::to_string(next_var++));
                for (const auto& p : ps) scope.push_back(p);
                XPtr body = term(scope, depth - 1);
                scope.resize(scope.size() - ps.size());
                std::vector<XPtr> items{XTerm::lam(ps, body)};
                for (unsigned k = 0; k < arity; ++k) items.push_back(term(scope, depth - 1));
                return XTerm::app(std::move(items));
            }
            case 2: {
                std::string x = "a" + std::to_string(next_var++);
                XPtr d = term(scope, depth - 1);
                scope.push_back(x);
                XPtr b = term(scope, depth - 1);
                scope.pop_back();
                return XTerm::let(x, d, b);
            }
            case 3: {
                unsigned n = 1 + rng() % 3;
                std::vector<XPtr> items;
                for (unsigned k = 0; k < n; ++k) items.push_back(term(scope, depth - 1));
                XPtr tup = XTerm::tuple(std::move(items));
                if (rng() % 2) return tup;
                return XTerm::proj(1 + rng() % n, tup);
            }
            default: {
                unsigned n = 1 + rng() % 2;
                std::vector<XPtr> items;
                for (unsigned k = 0; k < n; ++k) items.push_back(term(scope, depth - 1));
                return XTerm::tuple(std::move(items));
            }
        }
    }

    XPtr closed(int depth) {
        std::vector<std::string> scope;
        return term(scope, depth);
    }
};

// Random simply-typed closed source terms, fully annotated.
struct TypedGen {
    std::mt19937 rng;
    int next_var = 0;

    XTypePtr rand_type(int depth) {
        switch (depth <= 0 ? 0u : rng() % 4) {
            case 0: return XType::tvar("b" + std::to_string(rng() % 2));
            case 1: {
                std::vector<XTypePtr> ps;
                for (unsigned k = rng() % 3; k-- > 0;) ps.push_back(rand_type(depth - 1));
                return XType::tuple(std::move(ps));
            }
            default: {
                std::vector<XTypePtr> ps{rand_type(depth - 1)};
                if (rng() % 2) ps.push_back(rand_type(depth - 1));
                return XType::fn(std::move(ps), rand_type(depth - 1));
            }
        }
    }

    // Builds a closed term of the given type.
    XPtr of_type(const XTypePtr& ty, std::vector<std::pair<std::string, XTypePtr>>& scope,
                 int depth) {
        // use a variable of the right type when available
        if (depth <= 0 || rng() % 3 == 0) {
            std::vector<std::size_t> hits;
            for (std::size_t i = 0; i < scope.size(); ++i)
                if (type_eq(scope[i].second, ty)) hits.push_back(i);
            if (!hits.empty()) return XTerm::var(scope[hits[rng() % hits.size()]].first);
        }
        if (depth > 0 && rng() % 4 == 0) {  // redex of the target type
            std::string x = "t" + std::to_string(next_var++);
            XTypePtr at = rand_type(1);
            XPtr arg = of_type(at, scope, depth - 1);
            scope.emplace_back(x, at);
            XPtr body = of_type(ty, scope, depth - 1);
            scope.pop_back();
            return XTerm::app({XTerm::lam({x}, body, {at}), arg});
        }
        switch (ty->kind) {
            case XType::Fn: {
                std::vector<std::string> ps;
                std::vector<XTypePtr> pts = ty->params;
                for (std::size_t k = 0; k < pts.size(); ++k)
                    ps.push_back("t" + std::to_string(next_var++));
                for (std::size_t k = 0; k < ps.size(); ++k) scope.emplace_back(ps[k], pts[k]);
                XPtr body = of_type(ty->ret, scope, depth - 1);
                scope.resize(scope.size() - ps.size());
                return XTerm::lam(ps, body, pts);
            }
            case XType::Tuple: {
                std::vector<XPtr> items;
                for (const auto& p : ty->params) items.push_back(of_type(p, scope, depth - 1));
                return XTerm::tuple(std::move(items));
            }
            default: {
                // base type: wrap in a let or produce via projection sometimes
                if (depth > 0 && rng() % 3 == 0) {
                    XTypePtr other = rand_type(1);
                    XPtr tup = XTerm::tuple({of_type(ty, scope, depth - 1),
                                             of_type(other, scope, depth - 1)});
                    return XTerm::proj(1, tup);
                }
                return XTerm::tuple({});  // give up: unify base types with unit
            }
        }
    }

    // A closed term of some type, with all base leaves realized as ().
    std::pair<XPtr, XTypePtr> closed(int depth) {
        XTypePtr ty = rand_type(depth >= 2 ? 2 : depth);
        ty = unitize(ty);
        std::vector<std::pair<std::string, XTypePtr>> scope;
        XPtr t = of_type(ty, scope, depth);
        return {t, ty};
    }

    // replaces base tvars by the unit tuple type so of_type can always build
    XTypePtr unitize(const XTypePtr& t) {
        switch (t->kind) {
            case XType::TVar: return XType::tuple({});
            case XType::Fn: {
                std::vector<XTypePtr> ps;
                for (const auto& p : t->params) ps.push_back(unitize(p));
                return XType::fn(std::move(ps), unitize(t->ret));
            }
            case XType::Tuple: {
                std::vector<XTypePtr> ps;
                for (const auto& p : t->params) ps.push_back(unitize(p));
                return XType::tuple(std::move(ps));
            }
            default: return t;
        }
    }
};

bool steps_to_within(Stage st, XPtr from, const XPtr& to, int max_steps) {
    for (int k = 0; k < max_steps; ++k) {
        auto ss = step(st, from);
        if (ss.empty()) return false;
        from = ss[0];
        if (alpha_eq(from, to)) return true;
    }
    return false;
}

void check_no_nested_lambda(const XPtr& t, bool inside_lam, bool& ok) {
    switch (t->kind) {
        case XTerm::Var: return;
        case XTerm::Lam:
            if (inside_lam) ok = false;
            check_no_nested_lambda(t->body, true, ok);
            return;
        case XTerm::Tuple:
        case XTerm::App:
            for (const auto& i : t->items) check_no_nested_lambda(i, inside_lam, ok);
            return;
        case XTerm::Let:
            check_no_nested_lambda(t->def, inside_lam, ok);
            check_no_nested_lambda(t->body, inside_lam, ok);
            return;
        case XTerm::Proj: check_no_nested_lambda(t->def, inside_lam, ok); return;
    }
}

}  // namespace

TEST_CASE("cps golden: the paper's running example") {
    // M = @(\x. @(x, @(x, x)), \x. x)
    XPtr m = S("@(\\x. @(x, @(x, x)), \\x. x)");
    XPtr got = cps(m);
    XPtr want = S(
        "@(\\x k. @(x, x, \\y. @(x, y, k)),"
        "  \\x k. @(k, x),"
        "  \\x. @(halt, x))");
    CHECK_MESSAGE(alpha_eq(got, want), to_sexp(got));
    CHECK(wellformed(Stage::Cps, got));
}

TEST_CASE("cps of values and the empty tuple") {
    CHECK(alpha_eq(cps(S("\\x. x")), S("@(halt, \\x k. @(k, x))")));
    CHECK(alpha_eq(cps(S("()")), S("@(halt, ())")));
}

TEST_CASE("value_name golden") {
    XPtr n = cps(S("@(\\x. @(x, @(x, x)), \\x. x)"));
    XPtr got = value_name(n);
    XPtr want = S(
        "let z1 = \\x k. (let z11 = \\y. @(x, y, k) in @(x, x, z11)) in"
        " let z2 = \\x k. @(k, x) in"
        " let z3 = \\x. @(halt, x) in"
        " @(z1, z2, z3)");
    CHECK_MESSAGE(alpha_eq(got, want), to_sexp(got));
    CHECK(wellformed(Stage::Vn, got));

    XPtr already = S("@(x, y)");
    CHECK(alpha_eq(value_name(already), already));

    CHECK(alpha_eq(value_name(S("@(x, (y, z))")), S("let w = (y, z) in @(x, w)")));
}

TEST_CASE("readback inverts value naming") {
    CHECK(alpha_eq(readback(S("@(x, y, z)")), S("@(x, y, z)")));
    XPtr pres = S("let x = pi2(y) in @(x, x)");
    CHECK(alpha_eq(readback(pres), pres));

    std::mt19937 seed(42);
    SrcGen gen{std::mt19937(7)};
    for (int i = 0; i < 500; ++i) {
        XPtr m = gen.closed(4);
        XPtr c = cps(m);
        REQUIRE(wellformed(Stage::Cps, c));
        XPtr v = value_name(c);
        REQUIRE_MESSAGE(wellformed(Stage::Vn, v), to_sexp(v));
        CHECK_MESSAGE(alpha_eq(readback(v), c), to_sexp(c));
    }
}

TEST_CASE("closure conversion golden (modified, optimized halt)") {
    // vn(cps(\x. y)) = let z1 = \x k. @(k, y) in @(halt, z1)
    XPtr vn_term = value_name(cps(S("\\x. y")));
    CHECK(alpha_eq(vn_term, S("let z1 = \\x k. @(k, y) in @(halt, z1)")));
    XPtr got = closure_convert(vn_term);
    XPtr want = S(
        "let c = \\e x k."
        "  (let y = pi1(e) in"
        "   let k2 = pi1(k) in"
        "   let c2 = pi1(k2) in"
        "   let e2 = pi2(k2) in"
        "   @(c2, e2, y)) in"
        " let e = (y,) in"
        " let p = (c, e) in"
        " let z1 = (p,) in"
        " @(halt, z1)");
    CHECK_MESSAGE(alpha_eq(got, want), to_sexp(got));
    CHECK(wellformed(Stage::Cc, got));

    // closed function gets an empty environment tuple
    XPtr closed = closure_convert(S("let f = \\x. @(x, x) in @(f, f)"));
    XPtr want2 = S(
        "let c = \\e x."
        "  (let u = pi1(x) in let c2 = pi1(u) in let e2 = pi2(u) in @(c2, e2, x)) in"
        " let env = () in"
        " let p = (c, env) in"
        " let f = (p,) in"
        " let u2 = pi1(f) in let c3 = pi1(u2) in let e3 = pi2(u2) in"
        " @(c3, e3, f)");
    CHECK_MESSAGE(alpha_eq(closed, want2), to_sexp(closed));

    // free variables are collected in name order
    XPtr two_free = value_name(cps(S("\\q. (b, a, q)")));
    XPtr cc2 = closure_convert(two_free);
    bool found = false;
    std::function<void(const XPtr&)> scan = [&](const XPtr& t) {
        if (t->kind == XTerm::Let && t->def->kind == XTerm::Tuple &&
            t->def->items.size() == 2 && t->def->items[0]->kind == XTerm::Var &&
            t->def->items[0]->name == "a" && t->def->items[1]->name == "b")
            found = true;
        if (t->kind == XTerm::Let) {
            scan(t->def);
            scan(t->body);
        }
        if (t->kind == XTerm::Lam) scan(t->body);
    };
    scan(cc2);
    CHECK(found);
}

TEST_CASE("hoisting") {
    // cc output of the running example is already hoisted
    XPtr cc1 = closure_convert(value_name(cps(S("\\x. y"))));
    CHECK(alpha_eq(hoist(cc1), cc1));

    XPtr in = S("let x = (y,) in let f = \\z. @(z, z) in @(f, x)");
    XPtr want = S("let f = \\z. @(z, z) in let x = (y,) in @(f, x)");
    CHECK(alpha_eq(hoist(in), want));

    XPtr flat = S("let f = \\z. @(z, z) in @(f, f)");
    CHECK(alpha_eq(hoist(flat), flat));
}

TEST_CASE("pipeline output is hoisted and closed") {
    SrcGen gen{std::mt19937(99)};
    for (int i = 0; i < 300; ++i) {
        XPtr m = gen.closed(4);
        XPtr p = pipeline(m);
        REQUIRE_MESSAGE(wellformed(Stage::Hoisted, p), to_sexp(p));
        bool flat = true;
        check_no_nested_lambda(p, false, flat);
        CHECK(flat);
        // every function is closed up to halt
        std::function<void(const XPtr&)> scan = [&](const XPtr& t) {
            if (t->kind == XTerm::Lam) {
                auto fv = free_names(t);
                fv.erase(kHalt);
                CHECK_MESSAGE(fv.empty(), to_sexp(t));
            }
            if (t->kind == XTerm::Let) {
                scan(t->def);
                scan(t->body);
            } else if (t->kind == XTerm::Lam) {
                scan(t->body);
            }
        };
        scan(p);
    }
    // identity applied to identity: a 3-definition program ending in a tail call
    XPtr idid = pipeline(S("@(\\x. x, \\y. y)"));
    int defs = 0;
    XPtr cur = idid;
    while (cur->kind == XTerm::Let && cur->def->kind == XTerm::Lam) {
        ++defs;
        cur = cur->body;
    }
    CHECK(defs == 3);
}

TEST_CASE("src step semantics") {
    auto one = [&](const std::string& a) {
        auto ss = step(Stage::Src, S(a));
        REQUIRE(ss.size() == 1);
        return ss[0];
    };
    CHECK(alpha_eq(one("@(\\x. x, \\y. y)"), S("\\y. y")));
    CHECK(alpha_eq(one("pi2((\\x. x, \\y. (y, y)))"), S("\\y. (y, y)")));
    CHECK(alpha_eq(one("let x = (\\y. y,) in @(pi1(x), pi1(x))"),
                   S("@(pi1((\\y. y,)), pi1((\\y. y,)))")));
    CHECK(step(Stage::Src, S("\\x. x")).empty());
}

TEST_CASE("vn step semantics") {
    XPtr t = S("let f = \\y. @(y, y) in @(f, z)");
    auto ss = step(Stage::Vn, t);
    REQUIRE(ss.size() == 1);
    CHECK(alpha_eq(ss[0], S("let f = \\y. @(y, y) in @(z, z)")));

    XPtr p = S("let t = (a, b) in let x = pi2(t) in @(x, x)");
    auto sp = step(Stage::Vn, p);
    REQUIRE(sp.size() == 1);
    CHECK(alpha_eq(sp[0], S("let t = (a, b) in @(b, b)")));
}

TEST_CASE("CPS simulation on random closed source terms") {
    SrcGen gen{std::mt19937(11)};
    int stepped = 0;
    for (int i = 0; i < 500; ++i) {
        XPtr m = gen.closed(4);
        auto ss = step(Stage::Src, m);
        if (ss.empty()) continue;
        ++stepped;
        XPtr n = ss[0];
        XPtr cm = cps(m);
        XPtr cn = cps(n);
        bool simulated = alpha_eq(cm, cn) || steps_to_within(Stage::Cps, cm, cn, 10);
        CHECK_MESSAGE(simulated, to_sexp(m));
    }
    CHECK(stepped > 200);
}

TEST_CASE("VN simulation via readback") {
    SrcGen gen{std::mt19937(13)};
    int tested = 0;
    for (int i = 0; i < 600 && tested < 300; ++i) {
        XPtr t = value_name(cps(gen.closed(4)));
        XPtr m = readback(t);
        auto ms = step(Stage::Cps, m);
        if (ms.empty()) continue;
        ++tested;
        auto ts = step(Stage::Vn, t);
        REQUIRE_MESSAGE(!ts.empty(), to_sexp(t));
        CHECK_MESSAGE(alpha_eq(readback(ts[0]), ms[0]), to_sexp(t));
    }
    CHECK(tested == 300);
}

TEST_CASE("CC simulation") {
    SrcGen gen{std::mt19937(17)};
    int tested = 0;
    for (int i = 0; i < 600 && tested < 300; ++i) {
        XPtr t = value_name(cps(gen.closed(4)));
        auto ts = step(Stage::Vn, t);
        if (ts.empty()) continue;
        ++tested;
        XPtr a = closure_convert(t);
        XPtr b = closure_convert(ts[0]);
        CHECK_MESSAGE(steps_to_within(Stage::Cc, a, b, 40), to_sexp(t));
    }
    CHECK(tested == 300);
}

TEST_CASE("typed pipeline: annotations survive the passes") {
    TypedGen gen{std::mt19937(23)};
    for (int i = 0; i < 50; ++i) {
        auto [m, ty] = gen.closed(3);
        TypedCtx ctx;
        XPtr c = cps_typed(m, ctx);
        CHECK(wellformed(Stage::Cps, c));
        std::map<std::string, XTypePtr> halt_ty{
            {kHalt, XType::fn({cps_type(ty)}, XType::res())}};
        XPtr v = value_name_typed(c, halt_ty);
        CHECK(wellformed(Stage::Vn, v));
        std::map<std::string, XTypePtr> halt_vn = halt_ty;
        XPtr cc = closure_convert_typed(v, halt_vn);
        CHECK(wellformed(Stage::Cc, cc));
        XPtr h = hoist(cc);
        CHECK(wellformed(Stage::Hoisted, h));
    }
}

TEST_CASE("cps_type and cc_type clauses") {
    XTypePtr t = XType::tvar("t"), s = XType::tvar("s");
    CHECK(type_eq(cps_type(t), t));
    // cps(t -> s) = (t, (s -> R)) -> R
    XTypePtr want = XType::fn({t, XType::fn({s}, XType::res())}, XType::res());
    CHECK(type_eq(cps_type(XType::fn({t}, s)), want));
    CHECK(type_eq(cc_type(t), t));
    XTypePtr ccw = cc_type(XType::fn({t}, XType::res()));
    CHECK(ccw->kind == XType::Exists);
    CHECK(to_string(ccw) == "exists %t. x((%t, t) -> R, %t)");
}

TEST_CASE("sexp printing is stable") {
    XPtr m = S("let x = (a, b) in @(f, x)");
    CHECK(to_sexp(m) == "(let x (tuple a b) (app f x))");
}
