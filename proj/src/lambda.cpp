#include "opsem/lambda.hpp"

#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>

namespace opsem::lam {

LamPtr LamTerm::var(std::string x) {
    return std::make_shared<LamTerm>(LamTerm{Var, std::move(x), nullptr, nullptr, nullptr});
}
LamPtr LamTerm::abs(std::string x, LamPtr m) {
    return std::make_shared<LamTerm>(LamTerm{Abs, std::move(x), std::move(m), nullptr, nullptr});
}
LamPtr LamTerm::app(LamPtr m, LamPtr n) {
    return std::make_shared<LamTerm>(LamTerm{App, "", nullptr, std::move(m), std::move(n)});
}

namespace {

void fv_walk(const LamPtr& m, std::set<std::string>& bound, std::set<std::string>& out) {
    switch (m->kind) {
        case LamTerm::Var:
            if (!bound.count(m->name)) out.insert(m->name);
            return;
        case LamTerm::Abs: {
            bool fresh = bound.insert(m->name).second;
            fv_walk(m->body, bound, out);
            if (fresh) bound.erase(m->name);
            return;
        }
        case LamTerm::App:
            fv_walk(m->fn, bound, out);
            fv_walk(m->arg, bound, out);
            return;
    }
}

}  // namespace

std::set<std::string> free_vars(const LamPtr& m) {
    std::set<std::string> bound, out;
    fv_walk(m, bound, out);
    return out;
}

namespace {

bool alpha_walk(const LamPtr& a, const LamPtr& b, std::vector<std::pair<std::string, std::string>>& env) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case LamTerm::Var: {
            for (auto it = env.rbegin(); it != env.rend(); ++it) {
                bool la = it->first == a->name, lb = it->second == b->name;
                if (la || lb) return la && lb;
            }
            return a->name == b->name;
        }
        case LamTerm::Abs: {
            env.emplace_back(a->name, b->name);
            bool r = alpha_walk(a->body, b->body, env);
            env.pop_back();
            return r;
        }
        case LamTerm::App:
            return alpha_walk(a->fn, b->fn, env) && alpha_walk(a->arg, b->arg, env);
    }
    return false;
}

}  // namespace

bool alpha_eq(const LamPtr& a, const LamPtr& b) {
    std::vector<std::pair<std::string, std::string>> env;
    return alpha_walk(a, b, env);
}

namespace {

std::string fresh_name(const std::set<std::string>& avoid) {
    for (std::size_t k = 0;; ++k) {
        std::string c = "v" + std::to_string(k);
        if (!avoid.count(c)) return c;
    }
}

}  // namespace

LamPtr substitute(const LamPtr& n, const std::string& x, const LamPtr& m) {
    switch (n->kind) {
        case LamTerm::Var: return n->name == x ? m : n;
        case LamTerm::App:
            return LamTerm::app(substitute(n->fn, x, m), substitute(n->arg, x, m));
        case LamTerm::Abs: {
            std::set<std::string> fvn = free_vars(n);
            if (!fvn.count(x)) return n;  // x not free in λy.body
            std::set<std::string> fvm = free_vars(m);
            if (!fvm.count(n->name)) return LamTerm::abs(n->name, substitute(n->body, x, m));
            // rename the binder to the first variable fresh for body and m
            std::set<std::string> avoid = free_vars(n->body);
            avoid.insert(fvm.begin(), fvm.end());
            std::string z = fresh_name(avoid);
            LamPtr renamed = substitute(n->body, n->name, LamTerm::var(z));
            return LamTerm::abs(z, substitute(renamed, x, m));
        }
    }
    return n;
}

namespace {

bool is_eta_redex(const LamPtr& t) {
    return t->kind == LamTerm::Abs && t->body->kind == LamTerm::App &&
           t->body->arg->kind == LamTerm::Var && t->body->arg->name == t->name &&
           !free_vars(t->body->fn).count(t->name);
}

void reducts_walk(const LamPtr& t, RuleSet rules,
                  const std::function<LamPtr(const LamPtr&)>& plug, std::vector<LamPtr>& out) {
    if (t->kind == LamTerm::App && t->fn->kind == LamTerm::Abs)
        out.push_back(plug(substitute(t->fn->body, t->fn->name, t->arg)));
    if (rules == RuleSet::BetaEta && is_eta_redex(t)) out.push_back(plug(t->body->fn));
    switch (t->kind) {
        case LamTerm::Var: return;
        case LamTerm::Abs:
            reducts_walk(
                t->body, rules,
                [&](const LamPtr& u) { return plug(LamTerm::abs(t->name, u)); }, out);
            return;
        case LamTerm::App:
            reducts_walk(
                t->fn, rules, [&](const LamPtr& u) { return plug(LamTerm::app(u, t->arg)); },
                out);
            reducts_walk(
                t->arg, rules, [&](const LamPtr& u) { return plug(LamTerm::app(t->fn, u)); },
                out);
            return;
    }
}

}  // namespace

std::vector<LamPtr> reducts(const LamPtr& t, RuleSet rules) {
    std::vector<LamPtr> raw;
    reducts_walk(t, rules, [](const LamPtr& u) { return u; }, raw);
    std::vector<LamPtr> uniq;
    for (const auto& u : raw) {
        bool dup = false;
        for (const auto& v : uniq) dup = dup || alpha_eq(u, v);
        if (!dup) uniq.push_back(u);
    }
    return uniq;
}

namespace {

// Leftmost-outermost β step.
std::optional<LamPtr> step_no(const LamPtr& t) {
    if (t->kind == LamTerm::App && t->fn->kind == LamTerm::Abs)
        return substitute(t->fn->body, t->fn->name, t->arg);
    switch (t->kind) {
        case LamTerm::Var: return std::nullopt;
        case LamTerm::Abs:
            if (auto b = step_no(t->body)) return LamTerm::abs(t->name, *b);
            return std::nullopt;
        case LamTerm::App:
            if (auto f = step_no(t->fn)) return LamTerm::app(*f, t->arg);
            if (auto a = step_no(t->arg)) return LamTerm::app(t->fn, *a);
            return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

NormalizeResult normalize_no(const LamPtr& t, std::size_t fuel) {
    LamPtr cur = t;
    for (std::size_t steps = 0; steps <= fuel; ++steps) {
        auto n = step_no(cur);
        if (!n) return NormalForm{cur, steps};
        if (steps == fuel) break;
        cur = *n;
    }
    return FuelExhausted{};
}

LamPtr develop(const LamPtr& t) {
    switch (t->kind) {
        case LamTerm::Var: return t;
        case LamTerm::Abs: return LamTerm::abs(t->name, develop(t->body));
        case LamTerm::App:
            if (t->fn->kind == LamTerm::Abs)
                return substitute(develop(t->fn->body), t->fn->name, develop(t->arg));
            return LamTerm::app(develop(t->fn), develop(t->arg));
    }
    return t;
}

LamPtr develop_subset(const LamPtr& t, const std::function<bool()>& pick) {
    switch (t->kind) {
        case LamTerm::Var: return t;
        case LamTerm::Abs: return LamTerm::abs(t->name, develop_subset(t->body, pick));
        case LamTerm::App:
            if (t->fn->kind == LamTerm::Abs && pick())
                return substitute(develop_subset(t->fn->body, pick), t->fn->name,
                                  develop_subset(t->arg, pick));
            return LamTerm::app(develop_subset(t->fn, pick), develop_subset(t->arg, pick));
    }
    return t;
}

namespace {

struct OutOfFuel {};

LamPtr big_eval(const LamPtr& t, EvalStrategy st, std::size_t& fuel) {
    switch (t->kind) {
        case LamTerm::Var: throw std::invalid_argument("eval_big: open term");
        case LamTerm::Abs: return t;
        case LamTerm::App: {
            LamPtr f = big_eval(t->fn, st, fuel);
            if (fuel == 0) throw OutOfFuel{};
            --fuel;
            if (st == EvalStrategy::CBN)
                return big_eval(substitute(f->body, f->name, t->arg), st, fuel);
            LamPtr v = big_eval(t->arg, st, fuel);
            return big_eval(substitute(f->body, f->name, v), st, fuel);
        }
    }
    throw std::invalid_argument("eval_big: bad term");
}

}  // namespace

EvalResult eval_big(const LamPtr& t, EvalStrategy strategy, std::size_t fuel) {
    if (!free_vars(t).empty()) throw std::invalid_argument("eval_big: open term");
    try {
        return Value{big_eval(t, strategy, fuel)};
    } catch (const OutOfFuel&) {
        return FuelExhausted{};
    }
}

// -------------------------------------------------------------- de Bruijn form

DbPtr DbTerm::var(std::size_t i) {
    return std::make_shared<DbTerm>(DbTerm{Var, i, nullptr, nullptr, nullptr});
}
DbPtr DbTerm::abs(DbPtr m) {
    return std::make_shared<DbTerm>(DbTerm{Abs, 0, std::move(m), nullptr, nullptr});
}
DbPtr DbTerm::app(DbPtr m, DbPtr n) {
    return std::make_shared<DbTerm>(DbTerm{App, 0, nullptr, std::move(m), std::move(n)});
}

namespace {

DbPtr db_walk(const LamPtr& t, std::vector<std::string>& binders) {
    switch (t->kind) {
        case LamTerm::Var: {
            for (std::size_t k = binders.size(); k-- > 0;)
                if (binders[k] == t->name) return DbTerm::var(binders.size() - 1 - k);
            return nullptr;  // open
        }
        case LamTerm::Abs: {
            binders.push_back(t->name);
            DbPtr b = db_walk(t->body, binders);
            binders.pop_back();
            return b ? DbTerm::abs(b) : nullptr;
        }
        case LamTerm::App: {
            DbPtr f = db_walk(t->fn, binders);
            DbPtr a = f ? db_walk(t->arg, binders) : nullptr;
            return a ? DbTerm::app(f, a) : nullptr;
        }
    }
    return nullptr;
}

}  // namespace

std::optional<DbPtr> to_debruijn(const LamPtr& t) {
    std::vector<std::string> binders;
    DbPtr d = db_walk(t, binders);
    if (!d) return std::nullopt;
    return d;
}

bool db_eq(const DbPtr& a, const DbPtr& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case DbTerm::Var: return a->index == b->index;
        case DbTerm::Abs: return db_eq(a->body, b->body);
        case DbTerm::App: return db_eq(a->fn, b->fn) && db_eq(a->arg, b->arg);
    }
    return false;
}

namespace {

struct Env;
using EnvPtr = std::shared_ptr<const Env>;

struct Closure {
    DbPtr term;
    EnvPtr env;
};

struct Env {
    Closure head;
    EnvPtr tail;
};

const Closure* env_get(const EnvPtr& env, std::size_t i) {
    const Env* e = env.get();
    while (e) {
        if (i == 0) return &e->head;
        --i;
        e = e->tail.get();
    }
    return nullptr;
}

// Readback forces environments recursively, producing a named term.
LamPtr read_back(const Closure& c, std::vector<std::string>& binders, std::size_t& counter);

LamPtr read_term(const DbPtr& t, const EnvPtr& env, std::vector<std::string>& binders,
                 std::size_t depth, std::size_t& counter) {
    switch (t->kind) {
        case DbTerm::Var: {
            if (t->index < depth) return LamTerm::var(binders[binders.size() - 1 - t->index]);
            const Closure* c = env_get(env, t->index - depth);
            if (!c) throw std::invalid_argument("machine readback: dangling index");
            std::vector<std::string> fresh_binders;
            return read_back(*c, fresh_binders, counter);
        }
        case DbTerm::Abs: {
            std::string x = "v" + std::to_string(counter++);
            binders.push_back(x);
            LamPtr b = read_term(t->body, env, binders, depth + 1, counter);
            binders.pop_back();
            return LamTerm::abs(x, b);
        }
        case DbTerm::App: {
            LamPtr f = read_term(t->fn, env, binders, depth, counter);
            LamPtr a = read_term(t->arg, env, binders, depth, counter);
            return LamTerm::app(f, a);
        }
    }
    throw std::invalid_argument("machine readback: bad term");
}

LamPtr read_back(const Closure& c, std::vector<std::string>& binders, std::size_t& counter) {
    return read_term(c.term, c.env, binders, 0, counter);
}

LamPtr finish(const Closure& c) {
    std::vector<std::string> binders;
    std::size_t counter = 0;
    return read_back(c, binders, counter);
}

EvalResult run_cbn(const DbPtr& t, std::size_t fuel) {
    Closure cur{t, nullptr};
    std::vector<Closure> stack;
    for (std::size_t steps = 0;; ++steps) {
        if (cur.term->kind == DbTerm::Abs && stack.empty()) return Value{finish(cur)};
        if (steps >= fuel) return FuelExhausted{};
        switch (cur.term->kind) {
            case DbTerm::Var: {
                const Closure* c = env_get(cur.env, cur.term->index);
                if (!c) throw std::invalid_argument("machine: dangling index");
                cur = *c;
                break;
            }
            case DbTerm::App:
                stack.push_back(Closure{cur.term->arg, cur.env});
                cur = Closure{cur.term->fn, cur.env};
                break;
            case DbTerm::Abs: {
                Closure c = stack.back();
                stack.pop_back();
                cur = Closure{cur.term->body,
                              std::make_shared<Env>(Env{std::move(c), cur.env})};
                break;
            }
        }
    }
}

// Call-by-value stack entries: r:closure (argument pending) or
// l:value (operator evaluated, waiting for the argument).
struct CbvEntry {
    bool left;  // true = l:value, false = r:closure
    Closure c;
};

EvalResult run_cbv(const DbPtr& t, std::size_t fuel) {
    Closure cur{t, nullptr};
    std::vector<CbvEntry> stack;
    for (std::size_t steps = 0;; ++steps) {
        bool is_value = cur.term->kind == DbTerm::Abs;
        if (is_value && stack.empty()) return Value{finish(cur)};
        if (steps >= fuel) return FuelExhausted{};
        if (is_value) {
            CbvEntry top = stack.back();
            stack.pop_back();
            if (!top.left) {
                // (v, r:c:s) -> (c, l:v:s)
                stack.push_back(CbvEntry{true, cur});
                cur = top.c;
            } else {
                // (v, l : (λ.M)[η] : s) -> (M[v:η], s)
                const Closure& fn = top.c;
                if (fn.term->kind != DbTerm::Abs)
                    throw std::invalid_argument("machine: applied non-abstraction");
                cur = Closure{fn.term->body, std::make_shared<Env>(Env{cur, fn.env})};
            }
            continue;
        }
        switch (cur.term->kind) {
            case DbTerm::Var: {
                const Closure* c = env_get(cur.env, cur.term->index);
                if (!c) throw std::invalid_argument("machine: dangling index");
                cur = *c;
                break;
            }
            case DbTerm::App:
                stack.push_back(CbvEntry{false, Closure{cur.term->arg, cur.env}});
                cur = Closure{cur.term->fn, cur.env};
                break;
            default: break;
        }
    }
}

}  // namespace

EvalResult machine_run(const LamPtr& t, EvalStrategy strategy, std::size_t fuel) {
    auto db = to_debruijn(t);
    if (!db) throw std::invalid_argument("machine_run: open term");
    return strategy == EvalStrategy::CBN ? run_cbn(*db, fuel) : run_cbv(*db, fuel);
}

// -------------------------------------------------------------- Church numerals

LamPtr church(unsigned n) {
    LamPtr body = LamTerm::var("x");
    for (unsigned i = 0; i < n; ++i) body = LamTerm::app(LamTerm::var("f"), body);
    return LamTerm::abs("f", LamTerm::abs("x", body));
}

std::optional<unsigned> church_decode(const LamPtr& t, std::size_t fuel) {
    LamPtr probed = LamTerm::app(LamTerm::app(t, LamTerm::var("%f")), LamTerm::var("%x"));
    auto r = normalize_no(probed, fuel);
    if (!std::holds_alternative<NormalForm>(r)) return std::nullopt;
    LamPtr cur = std::get<NormalForm>(r).term;
    unsigned n = 0;
    while (cur->kind == LamTerm::App) {
        if (cur->fn->kind != LamTerm::Var || cur->fn->name != "%f") return std::nullopt;
        ++n;
        cur = cur->arg;
    }
    if (cur->kind != LamTerm::Var || cur->name != "%x") return std::nullopt;
    return n;
}

// ------------------------------------------------------------------------ text

namespace {

void print(const LamPtr& t, std::ostringstream& os, bool fn_pos, bool arg_pos) {
    switch (t->kind) {
        case LamTerm::Var: os << t->name; return;
        case LamTerm::Abs: {
            if (fn_pos || arg_pos) os << '(';
            os << '\\' << t->name;
            LamPtr b = t->body;
            while (b->kind == LamTerm::Abs) {
                os << ' ' << b->name;
                b = b->body;
            }
            os << ". ";
            print(b, os, false, false);
            if (fn_pos || arg_pos) os << ')';
            return;
        }
        case LamTerm::App: {
            if (arg_pos) os << '(';
            print(t->fn, os, true, false);
            os << ' ';
            print(t->arg, os, false, true);
            if (arg_pos) os << ')';
            return;
        }
    }
}

}  // namespace

std::string to_string(const LamPtr& t) {
    std::ostringstream os;
    print(t, os, false, false);
    return os.str();
}

namespace {

struct LamParser {
    const std::string& s;
    std::size_t i = 0;
    std::string error;
    std::size_t errpos = 0;

    void skip() {
        while (i < s.size()) {
            if (std::isspace(static_cast<unsigned char>(s[i]))) {
                ++i;
            } else if (s[i] == '#') {
                while (i < s.size() && s[i] != '\n') ++i;
            } else {
                break;
            }
        }
    }
    bool fail(const std::string& m) {
        if (error.empty()) {
            error = m;
            errpos = i;
        }
        return false;
    }
    bool eat(char c) {
        skip();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    bool eat_lambda() {
        skip();
        if (i < s.size() && s[i] == '\\') {
            ++i;
            return true;
        }
        if (i + 1 < s.size() && static_cast<unsigned char>(s[i]) == 0xce &&
            static_cast<unsigned char>(s[i + 1]) == 0xbb) {  // UTF-8 λ
            i += 2;
            return true;
        }
        return false;
    }
    std::optional<std::string> ident() {
        skip();
        std::size_t j = i;
        if (j >= s.size() || !(std::isalpha(static_cast<unsigned char>(s[j])) || s[j] == '_'))
            return std::nullopt;
        while (j < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\''))
            ++j;
        std::string r = s.substr(i, j - i);
        if (r == "let" || r == "in") return std::nullopt;
        i = j;
        return r;
    }
    bool keyword(const std::string& kw) {
        skip();
        if (s.compare(i, kw.size(), kw) != 0) return false;
        std::size_t j = i + kw.size();
        if (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
            return false;
        i = j;
        return true;
    }

    LamPtr atom() {
        if (eat('(')) {
            LamPtr m = term();
            if (!m) return nullptr;
            if (!eat(')')) {
                fail("expected ')'");
                return nullptr;
            }
            return m;
        }
        if (auto id = ident()) return LamTerm::var(*id);
        return nullptr;
    }

    LamPtr term() {
        skip();
        if (eat_lambda()) {
            std::vector<std::string> params;
            while (auto id = ident()) params.push_back(*id);
            if (params.empty()) {
                fail("expected parameter after lambda");
                return nullptr;
            }
            if (!eat('.')) {
                fail("expected '.'");
                return nullptr;
            }
            LamPtr body = term();
            if (!body) return nullptr;
            for (std::size_t k = params.size(); k-- > 0;) body = LamTerm::abs(params[k], body);
            return body;
        }
        if (keyword("let")) {
            auto x = ident();
            if (!x) {
                fail("expected identifier after let");
                return nullptr;
            }
            if (!eat('=')) {
                fail("expected '='");
                return nullptr;
            }
            LamPtr m = term();
            if (!m) return nullptr;
            if (!keyword("in")) {
                fail("expected 'in'");
                return nullptr;
            }
            LamPtr n = term();
            if (!n) return nullptr;
            return LamTerm::app(LamTerm::abs(*x, n), m);
        }
        LamPtr m = atom();
        if (!m) {
            fail("expected term");
            return nullptr;
        }
        while (true) {
            skip();
            if (i < s.size() && (s[i] == '\\' || static_cast<unsigned char>(s[i]) == 0xce)) {
                LamPtr arg = term();  // trailing abstraction extends maximally
                if (!arg) return nullptr;
                return LamTerm::app(m, arg);
            }
            std::size_t save = i;
            LamPtr a = atom();
            if (!a) {
                i = save;
                break;
            }
            m = LamTerm::app(m, a);
        }
        return m;
    }
};

}  // namespace

LamParseResult parse_lam(const std::string& src) {
    LamParser p{src};
    LamPtr t = p.term();
    p.skip();
    if (t && p.i != src.size()) {
        p.fail("trailing input");
        t = nullptr;
    }
    if (!t) return {std::nullopt, p.error.empty() ? "parse error" : p.error, p.errpos};
    return {t, "", 0};
}

}  // namespace opsem::lam
