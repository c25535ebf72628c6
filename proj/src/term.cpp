#include "opsem/term.hpp"

#include <cassert>
#include <cctype>
#include <deque>
#include <sstream>

namespace opsem::fo {

TermPtr Term::mk_var(std::string n) {
    return std::make_shared<Term>(Term{true, std::move(n), {}});
}

TermPtr Term::mk_app(std::string f, std::vector<TermPtr> as) {
    return std::make_shared<Term>(Term{false, std::move(f), std::move(as)});
}

bool term_eq(const TermPtr& a, const TermPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->var != b->var || a->name != b->name) return false;
    if (a->args.size() != b->args.size()) return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!term_eq(a->args[i], b->args[i])) return false;
    return true;
}

std::size_t term_size(const TermPtr& t) {
    std::size_t n = 1;
    for (const auto& a : t->args) n += term_size(a);
    return n;
}

void collect_vars(const TermPtr& t, std::set<std::string>& out) {
    if (t->var) {
        out.insert(t->name);
        return;
    }
    for (const auto& a : t->args) collect_vars(a, out);
}

std::set<std::string> vars(const TermPtr& t) {
    std::set<std::string> out;
    collect_vars(t, out);
    return out;
}

bool occurs(const std::string& x, const TermPtr& t) {
    if (t->var) return t->name == x;
    for (const auto& a : t->args)
        if (occurs(x, a)) return true;
    return false;
}

std::string to_string(const TermPtr& t) {
    if (t->var || t->args.empty()) return t->name;
    std::ostringstream os;
    os << t->name << '(';
    for (std::size_t i = 0; i < t->args.size(); ++i) {
        if (i) os << ", ";
        os << to_string(t->args[i]);
    }
    os << ')';
    return os.str();
}

bool Signature::well_formed(const TermPtr& t) const {
    if (t->var) return true;
    auto it = symbols.find(t->name);
    if (it == symbols.end() || it->second != static_cast<int>(t->args.size()))
        return false;
    for (const auto& a : t->args)
        if (!well_formed(a)) return false;
    return true;
}

TermPtr apply_subst(const Subst& s, const TermPtr& t) {
    if (t->var) {
        auto it = s.find(t->name);
        return it == s.end() ? t : it->second;
    }
    if (t->args.empty()) return t;
    std::vector<TermPtr> as;
    as.reserve(t->args.size());
    bool changed = false;
    for (const auto& a : t->args) {
        as.push_back(apply_subst(s, a));
        changed = changed || as.back().get() != a.get();
    }
    return changed ? Term::mk_app(t->name, std::move(as)) : t;
}

Subst compose_subst(const Subst& t, const Subst& s) {
    Subst r;
    for (const auto& [x, u] : s) {
        TermPtr v = apply_subst(t, u);
        if (!(v->var && v->name == x)) r.emplace(x, v);
    }
    for (const auto& [x, u] : t)
        if (!s.count(x) && !(u->var && u->name == x)) r.emplace(x, u);
    return r;
}

namespace {

// Termination measure of the unification rules: (distinct variables in E,
// total symbol count of E), compared lexicographically.
std::pair<std::size_t, std::size_t> measure(const std::deque<std::pair<TermPtr, TermPtr>>& e) {
    std::set<std::string> vs;
    std::size_t n = 0;
    for (const auto& [a, b] : e) {
        collect_vars(a, vs);
        collect_vars(b, vs);
        n += term_size(a) + term_size(b);
    }
    return {vs.size(), n};
}

void subst_in_place(std::deque<std::pair<TermPtr, TermPtr>>& e, const Subst& s) {
    for (auto& [a, b] : e) {
        a = apply_subst(s, a);
        b = apply_subst(s, b);
    }
}

}  // namespace

std::optional<Subst> unify(const EqSystem& e0) {
    std::deque<std::pair<TermPtr, TermPtr>> work(e0.begin(), e0.end());
    Subst sol;
    auto m = measure(work);
    while (!work.empty()) {
        auto [a, b] = work.front();
        work.pop_front();
        if (!a->var && b->var) std::swap(a, b);
        if (a->var) {
            if (b->var && b->name == a->name) {
                // rule (v)
            } else if (occurs(a->name, b)) {
                return std::nullopt;  // rule (vt2)
            } else {
                // rule (vt1)
                Subst one{{a->name, b}};
                subst_in_place(work, one);
                for (auto& [x, u] : sol) u = apply_subst(one, u);
                sol[a->name] = b;
            }
        } else {
            if (a->name != b->name || a->args.size() != b->args.size())
                return std::nullopt;  // rule (f2)
            for (std::size_t i = 0; i < a->args.size(); ++i)
                work.emplace_back(a->args[i], b->args[i]);  // rule (f1)
        }
        auto m2 = measure(work);
        assert(work.empty() || m2 < m);
        m = m2;
    }
    return sol;
}

namespace {

TermPtr rename_walk(const TermPtr& t, std::map<std::string, std::string>& m) {
    if (t->var) {
        auto it = m.find(t->name);
        if (it == m.end())
            it = m.emplace(t->name, "v" + std::to_string(m.size())).first;
        return Term::mk_var(it->second);
    }
    std::vector<TermPtr> as;
    as.reserve(t->args.size());
    for (const auto& a : t->args) as.push_back(rename_walk(a, m));
    return Term::mk_app(t->name, std::move(as));
}

}  // namespace

TermPtr canonical_rename(const TermPtr& t) {
    std::map<std::string, std::string> m;
    return rename_walk(t, m);
}

std::vector<TermPtr> canonical_rename_all(const std::vector<TermPtr>& ts) {
    std::map<std::string, std::string> m;
    std::vector<TermPtr> out;
    out.reserve(ts.size());
    for (const auto& t : ts) out.push_back(rename_walk(t, m));
    return out;
}

bool eq_up_to_renaming(const TermPtr& a, const TermPtr& b) {
    return term_eq(canonical_rename(a), canonical_rename(b));
}

namespace {

struct Parser {
    const Signature& sig;
    const std::string& s;
    std::size_t i = 0;
    ParseError err{0, ""};
    bool failed = false;

    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }

    bool fail(const std::string& msg) {
        if (!failed) err = {i, msg};
        failed = true;
        return false;
    }

    std::optional<std::string> ident() {
        skip();
        std::size_t j = i;
        auto ok = [&](char c, bool first) {
            unsigned char u = static_cast<unsigned char>(c);
            return std::isalpha(u) || std::isdigit(u) || c == '_' || c == '\'' ||
                   c == '*' || c == '+' || (first && false);
        };
        if (j >= s.size() || !ok(s[j], true)) return std::nullopt;
        while (j < s.size() && ok(s[j], false)) ++j;
        std::string r = s.substr(i, j - i);
        i = j;
        return r;
    }

    TermPtr term() {
        auto id = ident();
        if (!id) {
            fail("expected identifier");
            return nullptr;
        }
        skip();
        std::vector<TermPtr> as;
        bool has_args = false;
        if (i < s.size() && s[i] == '(') {
            has_args = true;
            ++i;
            skip();
            if (i < s.size() && s[i] == ')') {
                ++i;
            } else {
                while (true) {
                    TermPtr a = term();
                    if (!a) return nullptr;
                    as.push_back(a);
                    skip();
                    if (i < s.size() && s[i] == ',') {
                        ++i;
                        continue;
                    }
                    if (i < s.size() && s[i] == ')') {
                        ++i;
                        break;
                    }
                    fail("expected ',' or ')'");
                    return nullptr;
                }
            }
        }
        auto it = sig.symbols.find(*id);
        if (it != sig.symbols.end()) {
            if (static_cast<int>(as.size()) != it->second) {
                fail("arity mismatch for symbol " + *id);
                return nullptr;
            }
            return Term::mk_app(*id, std::move(as));
        }
        if (has_args) {
            fail("unknown symbol " + *id);
            return nullptr;
        }
        return Term::mk_var(*id);
    }
};

}  // namespace

std::optional<TermPtr> parse_term(const Signature& sig, const std::string& src, ParseError* err) {
    Parser p{sig, src};
    TermPtr t = p.term();
    p.skip();
    if (t && p.i != src.size()) {
        p.fail("trailing input");
        t = nullptr;
    }
    if (!t) {
        if (err) *err = p.err;
        return std::nullopt;
    }
    return t;
}

}  // namespace opsem::fo
