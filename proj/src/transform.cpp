#include "opsem/transform.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>

namespace opsem::xf {

// --------------------------------------------------------------------- types

XTypePtr XType::tvar(std::string t) {
    return std::make_shared<XType>(XType{TVar, std::move(t), {}, nullptr});
}
XTypePtr XType::fn(std::vector<XTypePtr> params, XTypePtr ret) {
    return std::make_shared<XType>(XType{Fn, "", std::move(params), std::move(ret)});
}
XTypePtr XType::tuple(std::vector<XTypePtr> items) {
    return std::make_shared<XType>(XType{Tuple, "", std::move(items), nullptr});
}
XTypePtr XType::res() {
    return std::make_shared<XType>(XType{Res, "", {}, nullptr});
}
XTypePtr XType::exists(std::string t, XTypePtr body) {
    return std::make_shared<XType>(XType{Exists, std::move(t), {}, std::move(body)});
}

namespace {

bool type_eq_walk(const XTypePtr& a, const XTypePtr& b,
                  std::vector<std::pair<std::string, std::string>>& env) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case XType::TVar: {
            for (auto it = env.rbegin(); it != env.rend(); ++it) {
                bool la = it->first == a->name, lb = it->second == b->name;
                if (la || lb) return la && lb;
            }
            return a->name == b->name;
        }
        case XType::Res: return true;
        case XType::Fn:
        case XType::Tuple: {
            if (a->params.size() != b->params.size()) return false;
            for (std::size_t i = 0; i < a->params.size(); ++i)
                if (!type_eq_walk(a->params[i], b->params[i], env)) return false;
            if (a->kind == XType::Fn) return type_eq_walk(a->ret, b->ret, env);
            return true;
        }
        case XType::Exists: {
            env.emplace_back(a->name, b->name);
            bool r = type_eq_walk(a->ret, b->ret, env);
            env.pop_back();
            return r;
        }
    }
    return false;
}

}  // namespace

bool type_eq(const XTypePtr& a, const XTypePtr& b) {
    std::vector<std::pair<std::string, std::string>> env;
    return type_eq_walk(a, b, env);
}

std::string to_string(const XTypePtr& t) {
    switch (t->kind) {
        case XType::TVar: return t->name;
        case XType::Res: return "R";
        case XType::Fn: {
            std::string s = "(";
            for (std::size_t i = 0; i < t->params.size(); ++i) {
                if (i) s += ", ";
                s += to_string(t->params[i]);
            }
            return s + ") -> " + to_string(t->ret);
        }
        case XType::Tuple: {
            std::string s = "x(";
            for (std::size_t i = 0; i < t->params.size(); ++i) {
                if (i) s += ", ";
                s += to_string(t->params[i]);
            }
            return s + ")";
        }
        case XType::Exists: return "exists " + t->name + ". " + to_string(t->ret);
    }
    return "";
}

namespace {

void ftv_walk(const XTypePtr& t, std::set<std::string>& bound, std::set<std::string>& out) {
    switch (t->kind) {
        case XType::TVar:
            if (!bound.count(t->name)) out.insert(t->name);
            return;
        case XType::Res: return;
        case XType::Fn:
            for (const auto& p : t->params) ftv_walk(p, bound, out);
            ftv_walk(t->ret, bound, out);
            return;
        case XType::Tuple:
            for (const auto& p : t->params) ftv_walk(p, bound, out);
            return;
        case XType::Exists: {
            bool fresh = bound.insert(t->name).second;
            ftv_walk(t->ret, bound, out);
            if (fresh) bound.erase(t->name);
            return;
        }
    }
}

}  // namespace

std::set<std::string> free_tvars(const XTypePtr& t) {
    std::set<std::string> bound, out;
    ftv_walk(t, bound, out);
    return out;
}

// --------------------------------------------------------------------- terms

XPtr XTerm::var(std::string x) {
    auto t = std::make_shared<XTerm>();
    t->kind = Var;
    t->name = std::move(x);
    return t;
}
XPtr XTerm::lam(std::vector<std::string> params, XPtr body, std::vector<XTypePtr> ptypes) {
    auto t = std::make_shared<XTerm>();
    t->kind = Lam;
    t->params = std::move(params);
    t->param_types = std::move(ptypes);
    t->body = std::move(body);
    return t;
}
XPtr XTerm::tuple(std::vector<XPtr> items) {
    auto t = std::make_shared<XTerm>();
    t->kind = Tuple;
    t->items = std::move(items);
    return t;
}
XPtr XTerm::app(std::vector<XPtr> items) {
    auto t = std::make_shared<XTerm>();
    t->kind = App;
    t->items = std::move(items);
    return t;
}
XPtr XTerm::let(std::string x, XPtr def, XPtr body, XTypePtr bind_type) {
    auto t = std::make_shared<XTerm>();
    t->kind = Let;
    t->name = std::move(x);
    t->def = std::move(def);
    t->body = std::move(body);
    t->bind_type = std::move(bind_type);
    return t;
}
XPtr XTerm::proj(std::size_t i, XPtr of) {
    auto t = std::make_shared<XTerm>();
    t->kind = Proj;
    t->index = i;
    t->def = std::move(of);
    return t;
}

bool is_value(const XPtr& t) {
    switch (t->kind) {
        case XTerm::Var:
        case XTerm::Lam: return true;
        case XTerm::Tuple:
            for (const auto& i : t->items)
                if (!is_value(i)) return false;
            return true;
        default: return false;
    }
}

namespace {

void fn_walk(const XPtr& t, std::vector<std::string>& bound, std::set<std::string>& out) {
    switch (t->kind) {
        case XTerm::Var: {
            for (const auto& b : bound)
                if (b == t->name) return;
            out.insert(t->name);
            return;
        }
        case XTerm::Lam: {
            for (const auto& p : t->params) bound.push_back(p);
            fn_walk(t->body, bound, out);
            bound.resize(bound.size() - t->params.size());
            return;
        }
        case XTerm::Tuple:
        case XTerm::App:
            for (const auto& i : t->items) fn_walk(i, bound, out);
            return;
        case XTerm::Let:
            fn_walk(t->def, bound, out);
            bound.push_back(t->name);
            fn_walk(t->body, bound, out);
            bound.pop_back();
            return;
        case XTerm::Proj: fn_walk(t->def, bound, out); return;
    }
}

}  // namespace

std::set<std::string> free_names(const XPtr& t) {
    std::vector<std::string> bound;
    std::set<std::string> out;
    fn_walk(t, bound, out);
    return out;
}

namespace {

struct NamePair {
    std::string a, b;
};

bool alpha_walk(const XPtr& a, const XPtr& b, std::vector<NamePair>& env) {
    if (a->kind != b->kind) return false;
    auto var_eq = [&env](const std::string& x, const std::string& y) {
        for (auto it = env.rbegin(); it != env.rend(); ++it) {
            bool la = it->a == x, lb = it->b == y;
            if (la || lb) return la && lb;
        }
        return x == y;
    };
    switch (a->kind) {
        case XTerm::Var: return var_eq(a->name, b->name);
        case XTerm::Lam: {
            if (a->params.size() != b->params.size()) return false;
            for (std::size_t i = 0; i < a->params.size(); ++i)
                env.push_back({a->params[i], b->params[i]});
            bool r = alpha_walk(a->body, b->body, env);
            env.resize(env.size() - a->params.size());
            return r;
        }
        case XTerm::Tuple:
        case XTerm::App: {
            if (a->items.size() != b->items.size()) return false;
            for (std::size_t i = 0; i < a->items.size(); ++i)
                if (!alpha_walk(a->items[i], b->items[i], env)) return false;
            return true;
        }
        case XTerm::Let: {
            if (!alpha_walk(a->def, b->def, env)) return false;
            env.push_back({a->name, b->name});
            bool r = alpha_walk(a->body, b->body, env);
            env.pop_back();
            return r;
        }
        case XTerm::Proj: return a->index == b->index && alpha_walk(a->def, b->def, env);
    }
    return false;
}

}  // namespace

bool alpha_eq(const XPtr& a, const XPtr& b) {
    std::vector<NamePair> env;
    return alpha_walk(a, b, env);
}

namespace {

std::string xfresh(const std::set<std::string>& avoid) {
    for (std::size_t k = 0;; ++k) {
        std::string c = "w" + std::to_string(k);
        if (!avoid.count(c)) return c;
    }
}

using NameMap = std::map<std::string, XPtr>;

XPtr subst_many(const XPtr& t, const NameMap& m) {
    if (m.empty()) return t;
    switch (t->kind) {
        case XTerm::Var: {
            auto it = m.find(t->name);
            return it == m.end() ? t : it->second;
        }
        case XTerm::Lam: {
            NameMap inner = m;
            for (const auto& p : t->params) inner.erase(p);
            if (inner.empty()) return t;
            // rename parameters that would capture free names of the images
            std::set<std::string> avoid = free_names(t->body);
            for (const auto& [k, v] : inner) {
                (void)k;
                auto fv = free_names(v);
                avoid.insert(fv.begin(), fv.end());
            }
            std::vector<std::string> ps = t->params;
            NameMap renames;
            for (auto& p : ps) {
                bool clash = false;
                for (const auto& [k, v] : inner) {
                    (void)k;
                    if (free_names(v).count(p)) clash = true;
                }
                if (clash) {
                    std::string np = xfresh(avoid);
                    avoid.insert(np);
                    renames[p] = XTerm::var(np);
                    p = np;
                }
            }
            XPtr body = renames.empty() ? t->body : subst_many(t->body, renames);
            return XTerm::lam(std::move(ps), subst_many(body, inner), t->param_types);
        }
        case XTerm::Tuple:
        case XTerm::App: {
            std::vector<XPtr> items;
            items.reserve(t->items.size());
            for (const auto& i : t->items) items.push_back(subst_many(i, m));
            return t->kind == XTerm::Tuple ? XTerm::tuple(std::move(items))
                                           : XTerm::app(std::move(items));
        }
        case XTerm::Let: {
            XPtr def = subst_many(t->def, m);
            NameMap inner = m;
            inner.erase(t->name);
            std::string binder = t->name;
            XPtr body = t->body;
            bool clash = false;
            for (const auto& [k, v] : inner) {
                (void)k;
                if (free_names(v).count(binder)) clash = true;
            }
            if (clash) {
                std::set<std::string> avoid = free_names(body);
                for (const auto& [k, v] : inner) {
                    (void)k;
                    auto fv = free_names(v);
                    avoid.insert(fv.begin(), fv.end());
                }
                std::string nb = xfresh(avoid);
                NameMap rn{{binder, XTerm::var(nb)}};
                body = subst_many(body, rn);
                binder = nb;
            }
            if (inner.empty()) return XTerm::let(binder, def, body, t->bind_type);
            return XTerm::let(binder, def, subst_many(body, inner), t->bind_type);
        }
        case XTerm::Proj: return XTerm::proj(t->index, subst_many(t->def, m));
    }
    return t;
}

}  // namespace

XPtr substitute(const XPtr& t, const std::string& x, const XPtr& by) {
    NameMap m{{x, by}};
    return subst_many(t, m);
}

// ----------------------------------------------------------- stage validators

namespace {

bool wf_cps_term(const XPtr& t);

bool wf_cps_value(const XPtr& t) {
    switch (t->kind) {
        case XTerm::Var: return true;
        case XTerm::Lam: return !t->params.empty() && wf_cps_term(t->body);
        case XTerm::Tuple:
            for (const auto& i : t->items)
                if (!wf_cps_value(i)) return false;
            return true;
        default: return false;
    }
}

bool wf_cps_term(const XPtr& t) {
    switch (t->kind) {
        case XTerm::App: {
            if (t->items.size() < 2) return false;
            for (const auto& i : t->items)
                if (!wf_cps_value(i)) return false;
            return true;
        }
        case XTerm::Let:
            return t->def->kind == XTerm::Proj && t->def->index >= 1 &&
                   wf_cps_value(t->def->def) && wf_cps_term(t->body);
        default: return false;
    }
}

bool wf_vn_term(const XPtr& t, bool functions_closed, bool no_inner_lam);

bool wf_vn_value(const XPtr& t, bool functions_closed, bool no_inner_lam) {
    switch (t->kind) {
        case XTerm::Lam: {
            if (t->params.empty()) return false;
            if (no_inner_lam) return false;
            if (functions_closed) {
                auto fv = free_names(t);
                fv.erase(kHalt);
                if (!fv.empty()) return false;
            }
            return wf_vn_term(t->body, functions_closed, no_inner_lam);
        }
        case XTerm::Tuple:
            for (const auto& i : t->items)
                if (i->kind != XTerm::Var) return false;
            return true;
        default: return false;
    }
}

bool wf_vn_term(const XPtr& t, bool functions_closed, bool no_inner_lam) {
    switch (t->kind) {
        case XTerm::App: {
            if (t->items.size() < 2) return false;
            for (const auto& i : t->items)
                if (i->kind != XTerm::Var) return false;
            return true;
        }
        case XTerm::Let: {
            const XPtr& c = t->def;
            bool ok = false;
            if (c->kind == XTerm::Proj)
                ok = c->index >= 1 && c->def->kind == XTerm::Var;
            else
                ok = wf_vn_value(c, functions_closed, no_inner_lam);
            return ok && wf_vn_term(t->body, functions_closed, no_inner_lam);
        }
        default: return false;
    }
}

bool wf_hoisted(const XPtr& t) {
    // leading function definitions, then a lambda-free restricted term
    XPtr cur = t;
    while (cur->kind == XTerm::Let && cur->def->kind == XTerm::Lam) {
        auto fv = free_names(cur->def);
        fv.erase(kHalt);
        if (!wf_vn_term(cur->def->body, true, true)) return false;
        cur = cur->body;
    }
    return wf_vn_term(cur, true, true);
}

bool wf_src(const XPtr& t) {
    switch (t->kind) {
        case XTerm::Var: return true;
        case XTerm::Lam: return !t->params.empty() && wf_src(t->body);
        case XTerm::Tuple:
        case XTerm::App: {
            if (t->kind == XTerm::App && t->items.size() < 2) return false;
            for (const auto& i : t->items)
                if (!wf_src(i)) return false;
            return true;
        }
        case XTerm::Let: return wf_src(t->def) && wf_src(t->body);
        case XTerm::Proj: return t->index >= 1 && wf_src(t->def);
    }
    return false;
}

}  // namespace

bool wellformed(Stage stage, const XPtr& t) {
    switch (stage) {
        case Stage::Src: return wf_src(t);
        case Stage::Cps: return wf_cps_term(t);
        case Stage::Vn: return wf_vn_term(t, false, false);
        case Stage::Cc: return wf_vn_term(t, true, false);
        case Stage::Hoisted: return wf_hoisted(t);
    }
    return false;
}

std::string to_sexp(const XPtr& t) {
    std::ostringstream os;
    switch (t->kind) {
        case XTerm::Var: return t->name;
        case XTerm::Lam: {
            os << "(lam (";
            for (std::size_t i = 0; i < t->params.size(); ++i) {
                if (i) os << ' ';
                os << t->params[i];
            }
            os << ") " << to_sexp(t->body) << ')';
            return os.str();
        }
        case XTerm::Tuple: {
            os << "(tuple";
            for (const auto& i : t->items) os << ' ' << to_sexp(i);
            os << ')';
            return os.str();
        }
        case XTerm::App: {
            os << "(app";
            for (const auto& i : t->items) os << ' ' << to_sexp(i);
            os << ')';
            return os.str();
        }
        case XTerm::Let:
            os << "(let " << t->name << ' ' << to_sexp(t->def) << ' ' << to_sexp(t->body) << ')';
            return os.str();
        case XTerm::Proj:
            os << "(proj " << t->index << ' ' << to_sexp(t->def) << ')';
            return os.str();
    }
    return "";
}

// ----------------------------------------------------------------------- cps

namespace {

struct FreshSupply {
    std::string prefix;
    std::size_t n = 0;
    std::string next() { return prefix + std::to_string(n++); }
};

// Continuations K ::= id | λid.M
struct Kont {
    bool is_name;
    std::string name;  // is_name: the name; else: the parameter
    XPtr body;         // else: the body

    XPtr as_value() const {
        if (is_name) return XTerm::var(name);
        return XTerm::lam({name}, body);
    }
};

struct CpsCtx {
    FreshSupply fresh{"%cps", 0};

    XPtr psi(const XPtr& v) {
        switch (v->kind) {
            case XTerm::Var: return v;
            case XTerm::Lam: {
                std::string k = fresh.next();
                std::vector<std::string> ps = v->params;
                ps.push_back(k);
                return XTerm::lam(std::move(ps), mk(v->body, Kont{true, k, nullptr}));
            }
            case XTerm::Tuple: {
                std::vector<XPtr> items;
                for (const auto& i : v->items) items.push_back(psi(i));
                return XTerm::tuple(std::move(items));
            }
            default: throw std::invalid_argument("psi: not a value");
        }
    }

    XPtr feed(const XPtr& value_img, const Kont& k) {
        if (k.is_name) return XTerm::app({XTerm::var(k.name), value_img});
        return substitute(k.body, k.name, value_img);
    }

    // Binds items[idx..] to names, then builds `finish` on the collected
    // value images. Value components are substituted directly (the
    // pre-computed administrative reductions).
    XPtr bind_seq(const std::vector<XPtr>& items, std::size_t idx, std::vector<XPtr> collected,
                  const std::function<XPtr(std::vector<XPtr>)>& finish) {
        if (idx == items.size()) return finish(std::move(collected));
        const XPtr& m = items[idx];
        if (is_value(m)) {
            collected.push_back(psi(m));
            return bind_seq(items, idx + 1, std::move(collected), finish);
        }
        std::string x = fresh.next();
        collected.push_back(XTerm::var(x));
        XPtr rest = bind_seq(items, idx + 1, std::move(collected), finish);
        return mk(m, Kont{false, x, rest});
    }

    XPtr mk(const XPtr& m, const Kont& k) {
        if (is_value(m)) return feed(psi(m), k);
        switch (m->kind) {
            case XTerm::App:
                return bind_seq(m->items, 0, {}, [&](std::vector<XPtr> xs) {
                    xs.push_back(k.as_value());
                    return XTerm::app(std::move(xs));
                });
            case XTerm::Let:
                return mk(m->def, Kont{false, m->name, mk(m->body, k)});
            case XTerm::Tuple:
                return bind_seq(m->items, 0, {}, [&](std::vector<XPtr> xs) {
                    return feed(XTerm::tuple(std::move(xs)), k);
                });
            case XTerm::Proj: {
                std::string x = fresh.next();
                std::string y = fresh.next();
                XPtr body = XTerm::let(y, XTerm::proj(m->index, XTerm::var(x)),
                                       feed(XTerm::var(y), k));
                return mk(m->def, Kont{false, x, body});
            }
            default: throw std::invalid_argument("cps: ill-formed source term");
        }
    }
};

}  // namespace

XPtr cps(const XPtr& m) {
    if (free_names(m).count(kHalt))
        throw std::invalid_argument("cps: `halt` is reserved");
    CpsCtx c;
    std::string x = c.fresh.next();
    return c.mk(m, Kont{false, x, XTerm::app({XTerm::var(kHalt), XTerm::var(x)})});
}

// ---------------------------------------------------------------- value_name

namespace {

struct VnCtx {
    FreshSupply fresh{"%vn", 0};
    using Wrap = std::vector<std::pair<std::string, XPtr>>;  // let name = value

    // Names a non-identifier CPS value, pushing its binding (and those of
    // nested non-identifier components) onto `wrap`, left to right.
    std::string name_value(const XPtr& v, Wrap& wrap) {
        if (v->kind == XTerm::Var) return v->name;
        if (v->kind == XTerm::Lam) {
            std::string y = fresh.next();
            wrap.emplace_back(y, XTerm::lam(v->params, walk(v->body), v->param_types));
            return y;
        }
        // tuple: name every non-identifier component first
        std::vector<XPtr> comps;
        for (const auto& c : v->items) comps.push_back(XTerm::var(name_value(c, wrap)));
        std::string y = fresh.next();
        wrap.emplace_back(y, XTerm::tuple(std::move(comps)));
        return y;
    }

    XPtr wrap_term(const Wrap& wrap, XPtr core) {
        for (std::size_t i = wrap.size(); i-- > 0;)
            core = XTerm::let(wrap[i].first, wrap[i].second, core);
        return core;
    }

    XPtr walk(const XPtr& t) {
        switch (t->kind) {
            case XTerm::App: {
                Wrap wrap;
                std::vector<XPtr> items;
                for (const auto& i : t->items) items.push_back(XTerm::var(name_value(i, wrap)));
                return wrap_term(wrap, XTerm::app(std::move(items)));
            }
            case XTerm::Let: {
                // let x = proj_i(V) in M
                const XPtr& p = t->def;
                Wrap wrap;
                std::string y = name_value(p->def, wrap);
                XPtr core = XTerm::let(t->name, XTerm::proj(p->index, XTerm::var(y)), walk(t->body),
                                       t->bind_type);
                return wrap_term(wrap, core);
            }
            default: throw std::invalid_argument("value_name: not a CPS term");
        }
    }
};

}  // namespace

XPtr value_name(const XPtr& m) {
    VnCtx c;
    return c.walk(m);
}

XPtr readback(const XPtr& m) {
    switch (m->kind) {
        case XTerm::App: return m;
        case XTerm::Let: {
            if (m->def->kind == XTerm::Proj)
                return XTerm::let(m->name, m->def, readback(m->body), m->bind_type);
            XPtr v = m->def;
            XPtr value = v->kind == XTerm::Lam
                             ? XTerm::lam(v->params, readback(v->body), v->param_types)
                             : v;  // tuples of names read back to themselves
            return substitute(readback(m->body), m->name, value);
        }
        default: throw std::invalid_argument("readback: not a value named term");
    }
}

// ----------------------------------------------------------- closure convert

namespace {

struct CcCtx {
    FreshSupply fresh{"%cc", 0};
    // Optional VN types of names in scope; drives output annotations.
    std::map<std::string, XTypePtr> tyenv;
    bool typed;

    XTypePtr ty(const std::string& x) {
        auto it = tyenv.find(x);
        return it == tyenv.end() ? nullptr : it->second;
    }

    XPtr walk(const XPtr& t) {
        switch (t->kind) {
            case XTerm::App: {
                const XPtr& head = t->items[0];
                if (head->kind == XTerm::Var && head->name == kHalt) return t;  // halt stays direct
                std::string u = fresh.next(), c = fresh.next(), e = fresh.next();
                std::vector<XPtr> call{XTerm::var(c), XTerm::var(e)};
                for (std::size_t i = 1; i < t->items.size(); ++i) call.push_back(t->items[i]);
                // types: head : exists s. x((s, A+) -> R, s)
                XTypePtr ut = nullptr, ct = nullptr, et = nullptr;
                if (typed) {
                    XTypePtr ht = ty(head->name);
                    if (ht && ht->kind == XType::Fn) ht = cc_type(ht);
                    if (ht && ht->kind == XType::Exists) {
                        std::string s = freshen_tvar(ht->name);
                        ut = subst_tvar(ht->ret, ht->name, XType::tvar(s));
                        ct = ut->params.at(0);
                        et = ut->params.at(1);
                    }
                }
                return XTerm::let(
                    u, XTerm::proj(1, head),
                    XTerm::let(c, XTerm::proj(1, XTerm::var(u)),
                               XTerm::let(e, XTerm::proj(2, XTerm::var(u)),
                                          XTerm::app(std::move(call)), et),
                               ct),
                    ut);
            }
            case XTerm::Let: {
                const XPtr& d = t->def;
                if (d->kind == XTerm::Lam) return convert_function(t);
                XTypePtr bt = t->bind_type;
                if (typed && !bt) bt = synth_bindable(d);
                auto saved = save(t->name, bt ? cc_type_of(bt, d->kind) : nullptr);
                XPtr body = walk(t->body);
                restore(saved);
                return XTerm::let(t->name, d, body, bt ? cc_out(bt) : nullptr);
            }
            default: throw std::invalid_argument("closure_convert: not a value named term");
        }
    }

    // cc of a non-function bindable keeps its (cc-translated) type
    XTypePtr cc_type_of(const XTypePtr& vn_type, XTerm::Kind) { return vn_type; }
    XTypePtr cc_out(const XTypePtr& vn_type) { return cc_type(vn_type); }

    XTypePtr synth_bindable(const XPtr& d) {
        if (d->kind == XTerm::Proj) {
            XTypePtr s = ty(d->def->name);
            if (s && s->kind == XType::Tuple && d->index <= s->params.size())
                return s->params[d->index - 1];
            return nullptr;
        }
        if (d->kind == XTerm::Tuple) {
            std::vector<XTypePtr> ts;
            for (const auto& i : d->items) {
                XTypePtr it = ty(i->name);
                if (!it) return nullptr;
                ts.push_back(it);
            }
            return XType::tuple(std::move(ts));
        }
        return nullptr;
    }

    std::size_t tvc = 0;
    std::string freshen_tvar(const std::string& base) { return base + "%" + std::to_string(tvc++); }

    static XTypePtr subst_tvar(const XTypePtr& t, const std::string& x, const XTypePtr& by) {
        switch (t->kind) {
            case XType::TVar: return t->name == x ? by : t;
            case XType::Res: return t;
            case XType::Fn: {
                std::vector<XTypePtr> ps;
                for (const auto& p : t->params) ps.push_back(subst_tvar(p, x, by));
                return XType::fn(std::move(ps), subst_tvar(t->ret, x, by));
            }
            case XType::Tuple: {
                std::vector<XTypePtr> ps;
                for (const auto& p : t->params) ps.push_back(subst_tvar(p, x, by));
                return XType::tuple(std::move(ps));
            }
            case XType::Exists:
                if (t->name == x) return t;
                return XType::exists(t->name, subst_tvar(t->ret, x, by));
        }
        return t;
    }

    using Saved = std::pair<std::string, std::optional<XTypePtr>>;
    Saved save(const std::string& x, XTypePtr t) {
        auto it = tyenv.find(x);
        Saved s{x, it == tyenv.end() ? std::nullopt : std::make_optional(it->second)};
        if (t)
            tyenv[x] = t;
        else
            tyenv.erase(x);
        return s;
    }
    void restore(const Saved& s) {
        if (s.second)
            tyenv[s.first] = *s.second;
        else
            tyenv.erase(s.first);
    }

    XPtr convert_function(const XPtr& let_term) {
        const XPtr& f = let_term->def;
        auto fv = free_names(f);
        fv.erase(kHalt);
        std::vector<std::string> zs(fv.begin(), fv.end());  // name order

        std::string c = fresh.next(), env = fresh.next(), pair = fresh.next();
        std::string e = fresh.next();

        XTypePtr env_ty = nullptr, code_ty = nullptr, pair_ty = nullptr, pack_ty = nullptr;
        std::vector<XTypePtr> cc_params;
        if (typed && !f->param_types.empty()) {
            std::vector<XTypePtr> zts;
            bool ok = true;
            for (const auto& z : zs) {
                XTypePtr zt = ty(z);
                if (!zt) ok = false;
                else zts.push_back(cc_type(zt));
            }
            if (ok) {
                env_ty = XType::tuple(zts);
                for (const auto& pt : f->param_types) cc_params.push_back(cc_type(pt));
                std::vector<XTypePtr> code_params{env_ty};
                for (const auto& p : cc_params) code_params.push_back(p);
                code_ty = XType::fn(code_params, XType::res());
                pair_ty = XType::tuple({code_ty, env_ty});
                std::string tv = freshen_tvar("%t");
                std::vector<XTypePtr> fn_params{XType::tvar(tv)};
                for (const auto& p : cc_params) fn_params.push_back(p);
                pack_ty = XType::exists(
                    tv, XType::tuple({XType::fn(fn_params, XType::res()), XType::tvar(tv)}));
            }
        }

        // code body: unpack the environment, then convert the function body
        std::vector<Saved> saved;
        if (typed)
            for (std::size_t i = 0; i < f->params.size(); ++i)
                saved.push_back(save(f->params[i],
                                     i < f->param_types.size() ? f->param_types[i] : nullptr));
        XPtr inner = walk(f->body);
        for (auto it = saved.rbegin(); it != saved.rend(); ++it) restore(*it);
        for (std::size_t i = zs.size(); i-- > 0;) {
            XTypePtr zt = typed ? ty(zs[i]) : nullptr;
            inner = XTerm::let(zs[i], XTerm::proj(i + 1, XTerm::var(e)), inner,
                               zt ? cc_type(zt) : nullptr);
        }
        std::vector<std::string> code_params{e};
        for (const auto& p : f->params) code_params.push_back(p);
        std::vector<XTypePtr> code_ptypes;
        if (env_ty) {
            code_ptypes.push_back(env_ty);
            for (const auto& p : cc_params) code_ptypes.push_back(p);
        }
        XPtr code = XTerm::lam(std::move(code_params), inner, std::move(code_ptypes));

        // continuation of the definition
        XTypePtr vn_fn_ty = let_term->bind_type;
        if (typed && !vn_fn_ty && !f->param_types.empty())
            vn_fn_ty = XType::fn(f->param_types, XType::res());
        auto sv = save(let_term->name, vn_fn_ty);
        XPtr rest = walk(let_term->body);
        restore(sv);

        std::vector<XPtr> env_items;
        for (const auto& z : zs) env_items.push_back(XTerm::var(z));
        return XTerm::let(
            c, code,
            XTerm::let(env, XTerm::tuple(std::move(env_items)),
                       XTerm::let(pair, XTerm::tuple({XTerm::var(c), XTerm::var(env)}),
                                  XTerm::let(let_term->name, XTerm::tuple({XTerm::var(pair)}),
                                             rest, pack_ty),
                                  pair_ty),
                       env_ty),
            code_ty);
    }
};

}  // namespace

XPtr closure_convert(const XPtr& m) {
    CcCtx c;
    c.typed = false;
    return c.walk(m);
}

// --------------------------------------------------------------------- hoist

namespace {

struct HoistedFun {
    std::string name;
    XPtr lam;
    XTypePtr bind_type;
};

XPtr hoist_walk(const XPtr& t, std::vector<HoistedFun>& funs) {
    switch (t->kind) {
        case XTerm::App: return t;
        case XTerm::Let: {
            if (t->def->kind == XTerm::Lam) {
                const XPtr& f = t->def;
                XPtr body = hoist_walk(f->body, funs);
                funs.push_back(
                    {t->name, XTerm::lam(f->params, body, f->param_types), t->bind_type});
                return hoist_walk(t->body, funs);
            }
            return XTerm::let(t->name, t->def, hoist_walk(t->body, funs), t->bind_type);
        }
        default: throw std::invalid_argument("hoist: not a value named term");
    }
}

}  // namespace

XPtr hoist(const XPtr& m) {
    std::vector<HoistedFun> funs;
    XPtr core = hoist_walk(m, funs);
    XPtr out = core;
    for (std::size_t i = funs.size(); i-- > 0;)
        out = XTerm::let(funs[i].name, funs[i].lam, out, funs[i].bind_type);
    return out;
}

XPtr pipeline(const XPtr& m) { return hoist(closure_convert(value_name(cps(m)))); }

// --------------------------------------------------------------- typed passes

XTypePtr TypedCtx::lookup(const std::string& x) const {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
        if (it->first == x) return it->second;
    return nullptr;
}

TypedCtx TypedCtx::extended(const std::string& x, XTypePtr t) const {
    TypedCtx c = *this;
    c.vars.emplace_back(x, std::move(t));
    return c;
}

XTypePtr cps_type(const XTypePtr& a) {
    switch (a->kind) {
        case XType::TVar: return a;
        case XType::Tuple: {
            std::vector<XTypePtr> ps;
            for (const auto& p : a->params) ps.push_back(cps_type(p));
            return XType::tuple(std::move(ps));
        }
        case XType::Fn: {
            std::vector<XTypePtr> ps;
            for (const auto& p : a->params) ps.push_back(cps_type(p));
            ps.push_back(XType::fn({cps_type(a->ret)}, XType::res()));  // ¬cps B
            return XType::fn(std::move(ps), XType::res());
        }
        default: throw std::invalid_argument("cps_type: not a source type");
    }
}

XTypePtr cc_type(const XTypePtr& a) {
    switch (a->kind) {
        case XType::TVar: return a;
        case XType::Res: return a;
        case XType::Tuple: {
            std::vector<XTypePtr> ps;
            for (const auto& p : a->params) ps.push_back(cc_type(p));
            return XType::tuple(std::move(ps));
        }
        case XType::Fn: {
            std::vector<XTypePtr> ps{XType::tvar("%t")};
            for (const auto& p : a->params) ps.push_back(cc_type(p));
            return XType::exists(
                "%t", XType::tuple({XType::fn(std::move(ps), XType::res()), XType::tvar("%t")}));
        }
        case XType::Exists: return XType::exists(a->name, cc_type(a->ret));
    }
    return a;
}

namespace {

XTypePtr synth_src(const XPtr& t, const TypedCtx& ctx) {
    switch (t->kind) {
        case XTerm::Var: {
            XTypePtr r = ctx.lookup(t->name);
            if (!r) throw std::invalid_argument("synth: unbound " + t->name);
            return r;
        }
        case XTerm::Lam: {
            if (t->param_types.size() != t->params.size())
                throw std::invalid_argument("synth: lambda missing annotations");
            TypedCtx c = ctx;
            for (std::size_t i = 0; i < t->params.size(); ++i)
                c = c.extended(t->params[i], t->param_types[i]);
            return XType::fn(t->param_types, synth_src(t->body, c));
        }
        case XTerm::Tuple: {
            std::vector<XTypePtr> ts;
            for (const auto& i : t->items) ts.push_back(synth_src(i, ctx));
            return XType::tuple(std::move(ts));
        }
        case XTerm::App: {
            XTypePtr f = synth_src(t->items[0], ctx);
            if (f->kind != XType::Fn) throw std::invalid_argument("synth: applying non-function");
            return f->ret;
        }
        case XTerm::Let:
            return synth_src(t->body, ctx.extended(t->name, synth_src(t->def, ctx)));
        case XTerm::Proj: {
            XTypePtr s = synth_src(t->def, ctx);
            if (s->kind != XType::Tuple || t->index > s->params.size())
                throw std::invalid_argument("synth: bad projection");
            return s->params[t->index - 1];
        }
    }
    throw std::invalid_argument("synth: bad term");
}

struct TypedKont {
    bool is_name;
    std::string name;
    XPtr body;
    XTypePtr param_type;  // cps type of the value it expects

    XPtr as_value() const {
        if (is_name) return XTerm::var(name);
        return XTerm::lam({name}, body, {param_type});
    }
};

struct TypedCps {
    FreshSupply fresh{"%cps", 0};

    XPtr psi(const XPtr& v, const TypedCtx& ctx) {
        switch (v->kind) {
            case XTerm::Var: return v;
            case XTerm::Lam: {
                std::string k = fresh.next();
                TypedCtx inner = ctx;
                for (std::size_t i = 0; i < v->params.size(); ++i)
                    inner = inner.extended(v->params[i], v->param_types[i]);
                XTypePtr b = synth_src(v->body, inner);
                std::vector<std::string> ps = v->params;
                ps.push_back(k);
                std::vector<XTypePtr> pt;
                for (const auto& a : v->param_types) pt.push_back(cps_type(a));
                pt.push_back(XType::fn({cps_type(b)}, XType::res()));
                return XTerm::lam(std::move(ps),
                                  mk(v->body, TypedKont{true, k, nullptr, nullptr}, inner),
                                  std::move(pt));
            }
            case XTerm::Tuple: {
                std::vector<XPtr> items;
                for (const auto& i : v->items) items.push_back(psi(i, ctx));
                return XTerm::tuple(std::move(items));
            }
            default: throw std::invalid_argument("psi: not a value");
        }
    }

    XPtr feed(const XPtr& img, const TypedKont& k) {
        if (k.is_name) return XTerm::app({XTerm::var(k.name), img});
        return substitute(k.body, k.name, img);
    }

    XPtr bind_seq(const std::vector<XPtr>& items, std::size_t idx, std::vector<XPtr> collected,
                  const TypedCtx& ctx, const std::function<XPtr(std::vector<XPtr>)>& finish) {
        if (idx == items.size()) return finish(std::move(collected));
        const XPtr& m = items[idx];
        if (is_value(m)) {
            collected.push_back(psi(m, ctx));
            return bind_seq(items, idx + 1, std::move(collected), ctx, finish);
        }
        std::string x = fresh.next();
        XTypePtr xt = cps_type(synth_src(m, ctx));
        collected.push_back(XTerm::var(x));
        XPtr rest = bind_seq(items, idx + 1, std::move(collected), ctx, finish);
        return mk(m, TypedKont{false, x, rest, xt}, ctx);
    }

    XPtr mk(const XPtr& m, const TypedKont& k, const TypedCtx& ctx) {
        if (is_value(m)) return feed(psi(m, ctx), k);
        switch (m->kind) {
            case XTerm::App:
                return bind_seq(m->items, 0, {}, ctx, [&](std::vector<XPtr> xs) {
                    xs.push_back(k.as_value());
                    return XTerm::app(std::move(xs));
                });
            case XTerm::Let: {
                XTypePtr dt = cps_type(synth_src(m->def, ctx));
                TypedCtx inner = ctx.extended(m->name, synth_src(m->def, ctx));
                return mk(m->def, TypedKont{false, m->name, mk(m->body, k, inner), dt}, ctx);
            }
            case XTerm::Tuple:
                return bind_seq(m->items, 0, {}, ctx, [&](std::vector<XPtr> xs) {
                    return feed(XTerm::tuple(std::move(xs)), k);
                });
            case XTerm::Proj: {
                std::string x = fresh.next(), y = fresh.next();
                XTypePtr st = cps_type(synth_src(m->def, ctx));
                XTypePtr yt = cps_type(synth_src(m, ctx));
                XPtr body =
                    XTerm::let(y, XTerm::proj(m->index, XTerm::var(x)), feed(XTerm::var(y), k), yt);
                return mk(m->def, TypedKont{false, x, body, st}, ctx);
            }
            default: throw std::invalid_argument("cps: ill-formed source term");
        }
    }
};

// Annotates the fresh lets of value naming with synthesized CPS types.
struct TypedVn {
    FreshSupply fresh{"%vn", 0};
    std::map<std::string, XTypePtr> env;

    XTypePtr value_type(const XPtr& v) {
        switch (v->kind) {
            case XTerm::Var: {
                auto it = env.find(v->name);
                return it == env.end() ? nullptr : it->second;
            }
            case XTerm::Lam: {
                if (v->param_types.size() != v->params.size()) return nullptr;
                return XType::fn(v->param_types, XType::res());
            }
            case XTerm::Tuple: {
                std::vector<XTypePtr> ts;
                for (const auto& i : v->items) {
                    XTypePtr t = value_type(i);
                    if (!t) return nullptr;
                    ts.push_back(t);
                }
                return XType::tuple(std::move(ts));
            }
            default: return nullptr;
        }
    }

    using Wrap = std::vector<std::pair<std::string, std::pair<XPtr, XTypePtr>>>;

    std::string name_value(const XPtr& v, Wrap& wrap) {
        if (v->kind == XTerm::Var) return v->name;
        if (v->kind == XTerm::Lam) {
            std::string y = fresh.next();
            XTypePtr t = value_type(v);
            std::map<std::string, XTypePtr> saved = env;
            for (std::size_t i = 0; i < v->params.size() && i < v->param_types.size(); ++i)
                env[v->params[i]] = v->param_types[i];
            XPtr body = walk(v->body);
            env = std::move(saved);
            wrap.push_back({y, {XTerm::lam(v->params, body, v->param_types), t}});
            env[y] = t;
            return y;
        }
        std::vector<XPtr> comps;
        for (const auto& c : v->items) comps.push_back(XTerm::var(name_value(c, wrap)));
        std::string y = fresh.next();
        XPtr tup = XTerm::tuple(std::move(comps));
        XTypePtr t = value_type(v);
        wrap.push_back({y, {tup, t}});
        env[y] = t;
        return y;
    }

    XPtr wrap_term(const Wrap& wrap, XPtr core) {
        for (std::size_t i = wrap.size(); i-- > 0;)
            core = XTerm::let(wrap[i].first, wrap[i].second.first, core, wrap[i].second.second);
        return core;
    }

    XPtr walk(const XPtr& t) {
        switch (t->kind) {
            case XTerm::App: {
                Wrap wrap;
                std::vector<XPtr> items;
                for (const auto& i : t->items) items.push_back(XTerm::var(name_value(i, wrap)));
                return wrap_term(wrap, XTerm::app(std::move(items)));
            }
            case XTerm::Let: {
                const XPtr& p = t->def;
                Wrap wrap;
                std::string y = name_value(p->def, wrap);
                XTypePtr bt = t->bind_type;
                if (!bt) {
                    XTypePtr s = env.count(y) ? env[y] : nullptr;
                    if (s && s->kind == XType::Tuple && p->index <= s->params.size())
                        bt = s->params[p->index - 1];
                }
                std::map<std::string, XTypePtr> saved = env;
                if (bt) env[t->name] = bt;
                XPtr body = walk(t->body);
                env = std::move(saved);
                return wrap_term(wrap, XTerm::let(t->name, XTerm::proj(p->index, XTerm::var(y)),
                                                  body, bt));
            }
            default: throw std::invalid_argument("value_name: not a CPS term");
        }
    }
};

}  // namespace

XPtr cps_typed(const XPtr& m, const TypedCtx& ctx) {
    if (free_names(m).count(kHalt))
        throw std::invalid_argument("cps: `halt` is reserved");
    TypedCps c;
    std::string x = c.fresh.next();
    XTypePtr xt = cps_type(synth_src(m, ctx));
    return c.mk(m,
                TypedKont{false, x, XTerm::app({XTerm::var(kHalt), XTerm::var(x)}), xt},
                ctx);
}

XPtr value_name_typed(const XPtr& m, const std::map<std::string, XTypePtr>& free_types) {
    TypedVn c;
    c.env = free_types;
    return c.walk(m);
}

XPtr closure_convert_typed(const XPtr& m, const std::map<std::string, XTypePtr>& free_types) {
    CcCtx c;
    c.typed = true;
    c.tyenv = free_types;
    return c.walk(m);
}

// -------------------------------------------------------------- step semantics

namespace {

std::optional<XPtr> step_src(const XPtr& t) {
    if (is_value(t)) return std::nullopt;
    switch (t->kind) {
        case XTerm::App:
        case XTerm::Tuple: {
            for (std::size_t i = 0; i < t->items.size(); ++i) {
                if (is_value(t->items[i])) continue;
                auto s = step_src(t->items[i]);
                if (!s) return std::nullopt;
                std::vector<XPtr> items = t->items;
                items[i] = *s;
                return t->kind == XTerm::App ? XTerm::app(std::move(items))
                                             : XTerm::tuple(std::move(items));
            }
            if (t->kind == XTerm::Tuple) return std::nullopt;
            const XPtr& f = t->items[0];
            if (f->kind != XTerm::Lam || f->params.size() != t->items.size() - 1)
                return std::nullopt;  // stuck
            NameMap m;
            for (std::size_t i = 0; i < f->params.size(); ++i) m[f->params[i]] = t->items[i + 1];
            return subst_many(f->body, m);
        }
        case XTerm::Let: {
            if (is_value(t->def)) return substitute(t->body, t->name, t->def);
            auto s = step_src(t->def);
            if (!s) return std::nullopt;
            return XTerm::let(t->name, *s, t->body, t->bind_type);
        }
        case XTerm::Proj: {
            if (is_value(t->def)) {
                if (t->def->kind != XTerm::Tuple || t->index > t->def->items.size())
                    return std::nullopt;
                return t->def->items[t->index - 1];
            }
            auto s = step_src(t->def);
            if (!s) return std::nullopt;
            return XTerm::proj(t->index, *s);
        }
        default: return std::nullopt;
    }
}

// CPS stage: root redexes only; the projection let is a single fused step.
std::optional<XPtr> step_cps(const XPtr& t) {
    switch (t->kind) {
        case XTerm::App: {
            const XPtr& f = t->items[0];
            if (f->kind != XTerm::Lam || f->params.size() != t->items.size() - 1)
                return std::nullopt;
            NameMap m;
            for (std::size_t i = 0; i < f->params.size(); ++i) m[f->params[i]] = t->items[i + 1];
            return subst_many(f->body, m);
        }
        case XTerm::Let: {
            const XPtr& p = t->def;  // proj_i(V)
            if (p->kind != XTerm::Proj || p->def->kind != XTerm::Tuple ||
                p->index > p->def->items.size())
                return std::nullopt;
            return substitute(t->body, t->name, p->def->items[p->index - 1]);
        }
        default: return std::nullopt;
    }
}

// E(x) in the value named calculi, with the paper's shadowing side condition.
const XPtr* vn_env_lookup(const std::vector<std::pair<std::string, XPtr>>& env,
                          const std::string& x) {
    for (std::size_t j = env.size(); j-- > 0;) {
        if (env[j].first != x) continue;
        for (std::size_t l = j + 1; l < env.size(); ++l)
            if (free_names(env[j].second).count(env[l].first)) return nullptr;
        return &env[j].second;
    }
    return nullptr;
}

std::optional<XPtr> step_vn(const XPtr& t) {
    // split the evaluation context: chain of value lets
    std::vector<std::pair<std::string, XPtr>> env;
    std::vector<const XTerm*> prefix;
    const XTerm* cur = t.get();
    while (cur->kind == XTerm::Let && cur->def->kind != XTerm::Proj) {
        env.emplace_back(cur->name, cur->def);
        prefix.push_back(cur);
        cur = cur->body.get();
    }
    auto rebuild = [&](XPtr core) {
        for (std::size_t i = prefix.size(); i-- > 0;)
            core = XTerm::let(prefix[i]->name, prefix[i]->def, core, prefix[i]->bind_type);
        return core;
    };
    if (cur->kind == XTerm::App) {
        const XPtr& head = cur->items[0];
        if (head->kind != XTerm::Var) return std::nullopt;
        const XPtr* v = vn_env_lookup(env, head->name);
        if (!v || (*v)->kind != XTerm::Lam || (*v)->params.size() != cur->items.size() - 1)
            return std::nullopt;
        NameMap m;
        for (std::size_t i = 0; i < (*v)->params.size(); ++i)
            m[(*v)->params[i]] = cur->items[i + 1];
        return rebuild(subst_many((*v)->body, m));
    }
    if (cur->kind == XTerm::Let) {  // let z = proj_i(x) in M
        const XPtr& p = cur->def;
        if (p->def->kind != XTerm::Var) return std::nullopt;
        const XPtr* v = vn_env_lookup(env, p->def->name);
        if (!v || (*v)->kind != XTerm::Tuple || p->index > (*v)->items.size())
            return std::nullopt;
        return rebuild(substitute(cur->body, cur->name, (*v)->items[p->index - 1]));
    }
    return std::nullopt;
}

}  // namespace

std::vector<XPtr> step(Stage stage, const XPtr& t) {
    std::optional<XPtr> s;
    switch (stage) {
        case Stage::Src: s = step_src(t); break;
        case Stage::Cps: s = step_cps(t); break;
        case Stage::Vn:
        case Stage::Cc:
        case Stage::Hoisted: s = step_vn(t); break;
    }
    if (!s) return {};
    return {*s};
}

// ---------------------------------------------------------------------- parse

namespace {

struct SrcParser {
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
    bool keyword(const std::string& kw) {
        skip();
        if (s.compare(i, kw.size(), kw) != 0) return false;
        std::size_t j = i + kw.size();
        if (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
            return false;
        i = j;
        return true;
    }
    std::optional<std::string> ident() {
        skip();
        std::size_t j = i;
        if (j >= s.size() || !(std::isalpha(static_cast<unsigned char>(s[j])) || s[j] == '_' ||
                               s[j] == '%'))
            return std::nullopt;
        while (j < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '%' ||
                s[j] == '\''))
            ++j;
        std::string r = s.substr(i, j - i);
        if (r == "let" || r == "in") return std::nullopt;
        i = j;
        return r;
    }

    XPtr term() {
        skip();
        if (i < s.size() && s[i] == '\\') {
            ++i;
            std::vector<std::string> ps;
            while (auto id = ident()) ps.push_back(*id);
            if (ps.empty()) {
                fail("expected parameter");
                return nullptr;
            }
            if (!eat('.')) {
                fail("expected '.'");
                return nullptr;
            }
            XPtr b = term();
            if (!b) return nullptr;
            return XTerm::lam(std::move(ps), b);
        }
        if (keyword("let")) {
            auto x = ident();
            if (!x) {
                fail("expected identifier");
                return nullptr;
            }
            if (!eat('=')) {
                fail("expected '='");
                return nullptr;
            }
            XPtr d = term();
            if (!d) return nullptr;
            if (!keyword("in")) {
                fail("expected 'in'");
                return nullptr;
            }
            XPtr b = term();
            if (!b) return nullptr;
            return XTerm::let(*x, d, b);
        }
        if (eat('@')) {
            if (!eat('(')) {
                fail("expected '(' after @");
                return nullptr;
            }
            std::vector<XPtr> items;
            do {
                XPtr m = term();
                if (!m) return nullptr;
                items.push_back(m);
            } while (eat(','));
            if (!eat(')')) {
                fail("expected ')'");
                return nullptr;
            }
            if (items.size() < 2) {
                fail("application needs a function and at least one argument");
                return nullptr;
            }
            return XTerm::app(std::move(items));
        }
        skip();
        if (s.compare(i, 2, "pi") == 0 && i + 2 < s.size() &&
            std::isdigit(static_cast<unsigned char>(s[i + 2]))) {
            i += 2;
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            std::size_t idx = std::stoul(s.substr(i, j - i));
            i = j;
            if (!eat('(')) {
                fail("expected '(' after projection");
                return nullptr;
            }
            XPtr m = term();
            if (!m) return nullptr;
            if (!eat(')')) {
                fail("expected ')'");
                return nullptr;
            }
            if (idx == 0) {
                fail("projection index starts at 1");
                return nullptr;
            }
            return XTerm::proj(idx, m);
        }
        if (eat('(')) {
            skip();
            if (eat(')')) return XTerm::tuple({});
            XPtr first = term();
            if (!first) return nullptr;
            if (eat(')')) return first;  // grouping
            std::vector<XPtr> items{first};
            while (eat(',')) {
                skip();
                if (i < s.size() && s[i] == ')') break;  // (M,) 1-tuple
                XPtr m = term();
                if (!m) return nullptr;
                items.push_back(m);
            }
            if (!eat(')')) {
                fail("expected ')'");
                return nullptr;
            }
            return XTerm::tuple(std::move(items));
        }
        if (auto id = ident()) return XTerm::var(*id);
        fail("expected term");
        return nullptr;
    }
};

}  // namespace

XParseResult parse_src(const std::string& src) {
    SrcParser p{src};
    XPtr t = p.term();
    p.skip();
    if (t && p.i != src.size()) {
        p.fail("trailing input");
        t = nullptr;
    }
    if (!t) return {std::nullopt, p.error.empty() ? "parse error" : p.error, p.errpos};
    return {t, "", 0};
}

}  // namespace opsem::xf
