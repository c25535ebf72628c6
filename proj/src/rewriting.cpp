#include "opsem/rewriting.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

namespace opsem::trs {

bool rule_well_formed(const Rule& r) {
    if (r.lhs->var) return false;
    auto lv = fo::vars(r.lhs);
    for (const auto& v : fo::vars(r.rhs))
        if (!lv.count(v)) return false;
    return true;
}

std::optional<Subst> match(const TermPtr& pattern, const TermPtr& subject) {
    Subst s;
    std::deque<std::pair<TermPtr, TermPtr>> work{{pattern, subject}};
    while (!work.empty()) {
        auto [p, t] = work.front();
        work.pop_front();
        if (p->var) {
            auto it = s.find(p->name);
            if (it == s.end())
                s.emplace(p->name, t);
            else if (!fo::term_eq(it->second, t))
                return std::nullopt;
        } else {
            if (t->var || t->name != p->name || t->args.size() != p->args.size())
                return std::nullopt;
            for (std::size_t i = 0; i < p->args.size(); ++i)
                work.emplace_back(p->args[i], t->args[i]);
        }
    }
    return s;
}

namespace {

TermPtr replace_at(const TermPtr& t, const std::vector<std::size_t>& pos, std::size_t d,
                   const TermPtr& repl) {
    if (d == pos.size()) return repl;
    std::vector<TermPtr> as = t->args;
    as[pos[d]] = replace_at(as[pos[d]], pos, d + 1, repl);
    return Term::mk_app(t->name, std::move(as));
}

void all_reducts_at(const Trs& r, const TermPtr& root, const TermPtr& sub,
                    std::vector<std::size_t>& pos, std::vector<TermPtr>& out) {
    if (!sub->var) {
        for (const auto& rule : r.rules) {
            if (auto s = match(rule.lhs, sub))
                out.push_back(replace_at(root, pos, 0, fo::apply_subst(*s, rule.rhs)));
        }
        for (std::size_t i = 0; i < sub->args.size(); ++i) {
            pos.push_back(i);
            all_reducts_at(r, root, sub->args[i], pos, out);
            pos.pop_back();
        }
    }
}

}  // namespace

std::vector<TermPtr> rewrite_all(const Trs& r, const TermPtr& t) {
    std::vector<TermPtr> out;
    std::vector<std::size_t> pos;
    all_reducts_at(r, t, t, pos, out);
    // dedup
    std::vector<TermPtr> uniq;
    for (const auto& u : out) {
        bool dup = false;
        for (const auto& v : uniq)
            if (fo::term_eq(u, v)) {
                dup = true;
                break;
            }
        if (!dup) uniq.push_back(u);
    }
    return uniq;
}

namespace {

// Leftmost-innermost: post-order, children left to right.
std::optional<TermPtr> step_li(const Trs& r, const TermPtr& t) {
    if (t->var) return std::nullopt;
    for (std::size_t i = 0; i < t->args.size(); ++i) {
        if (auto u = step_li(r, t->args[i])) {
            std::vector<TermPtr> as = t->args;
            as[i] = *u;
            return Term::mk_app(t->name, std::move(as));
        }
    }
    for (const auto& rule : r.rules)
        if (auto s = match(rule.lhs, t)) return fo::apply_subst(*s, rule.rhs);
    return std::nullopt;
}

// Leftmost-outermost: pre-order.
std::optional<TermPtr> step_lo(const Trs& r, const TermPtr& t) {
    if (t->var) return std::nullopt;
    for (const auto& rule : r.rules)
        if (auto s = match(rule.lhs, t)) return fo::apply_subst(*s, rule.rhs);
    for (std::size_t i = 0; i < t->args.size(); ++i) {
        if (auto u = step_lo(r, t->args[i])) {
            std::vector<TermPtr> as = t->args;
            as[i] = *u;
            return Term::mk_app(t->name, std::move(as));
        }
    }
    return std::nullopt;
}

}  // namespace

NormalizeResult normalize(const Trs& r, const TermPtr& t, Strategy strategy, std::size_t fuel) {
    TermPtr cur = t;
    std::size_t steps = 0;
    while (steps < fuel) {
        auto next = strategy == Strategy::LeftmostInnermost ? step_li(r, cur) : step_lo(r, cur);
        if (!next) return {true, cur, steps};
        cur = *next;
        ++steps;
    }
    auto last = strategy == Strategy::LeftmostInnermost ? step_li(r, cur) : step_lo(r, cur);
    if (!last) return {true, cur, steps};
    return {false, cur, steps};
}

// ---------------------------------------------------------------------- RPO

bool RpoParams::prec_greater(const std::string& f, const std::string& g) const {
    auto i = precedence.find(f);
    auto j = precedence.find(g);
    if (i == precedence.end() || j == precedence.end()) return false;
    return i->second > j->second;
}

Status RpoParams::status_of(const std::string& f) const {
    auto it = status.find(f);
    return it == status.end() ? Status::LexLeftRight : it->second;
}

namespace {

bool rpo_gte(const RpoParams& p, const TermPtr& s, const TermPtr& t);

bool tuple_greater(const RpoParams& p, Status st, const std::vector<TermPtr>& ss,
                   const std::vector<TermPtr>& ts) {
    switch (st) {
        case Status::LexLeftRight:
            for (std::size_t i = 0; i < ss.size(); ++i) {
                if (fo::term_eq(ss[i], ts[i])) continue;
                return rpo_greater(p, ss[i], ts[i]);
            }
            return false;
        case Status::LexRightLeft:
            for (std::size_t k = ss.size(); k-- > 0;) {
                if (fo::term_eq(ss[k], ts[k])) continue;
                return rpo_greater(p, ss[k], ts[k]);
            }
            return false;
        case Status::Multiset:
            return multiset_greater(
                [&p](const TermPtr& a, const TermPtr& b) { return rpo_greater(p, a, b); }, ss, ts);
    }
    return false;
}

bool rpo_gte(const RpoParams& p, const TermPtr& s, const TermPtr& t) {
    return fo::term_eq(s, t) || rpo_greater(p, s, t);
}

}  // namespace

bool rpo_greater(const RpoParams& p, const TermPtr& s, const TermPtr& t) {
    if (s->var) return false;
    // (R1) some argument of s is >= t
    for (const auto& si : s->args)
        if (rpo_gte(p, si, t)) return true;
    if (t->var) return false;
    auto dominates_args = [&]() {
        for (const auto& tj : t->args)
            if (!rpo_greater(p, s, tj)) return false;
        return true;
    };
    // (R2) head precedence
    if (p.prec_greater(s->name, t->name)) return dominates_args();
    // (R3) equal heads, status comparison plus domination of all arguments
    if (s->name == t->name && s->args.size() == t->args.size())
        return tuple_greater(p, p.status_of(s->name), s->args, t->args) && dominates_args();
    return false;
}

bool multiset_greater(const std::function<bool(const TermPtr&, const TermPtr&)>& base,
                      const std::vector<TermPtr>& m, const std::vector<TermPtr>& n) {
    return multiset_greater_impl<TermPtr>(
        m, n, base, [](const TermPtr& a, const TermPtr& b) { return fo::term_eq(a, b); });
}

bool multiset_greater_nat(const std::vector<long>& m, const std::vector<long>& n) {
    return multiset_greater_impl<long>(
        m, n, [](long a, long b) { return a > b; },
        [](const long& a, const long& b) { return a == b; });
}

// ----------------------------------------------------------------- polynomials

Poly Poly::constant(std::int64_t c) {
    Poly p;
    if (c != 0) p.monos[{}] = c;
    return p;
}

Poly Poly::variable(std::size_t index, std::size_t nvars) {
    Poly p;
    std::vector<unsigned> e(nvars, 0);
    e[index] = 1;
    p.monos[e] = 1;
    return p;
}

namespace {

std::vector<unsigned> pad(const std::vector<unsigned>& e, std::size_t n) {
    std::vector<unsigned> r = e;
    r.resize(n, 0);
    return r;
}

std::size_t width(const Poly& a, const Poly& b) {
    std::size_t n = 0;
    for (const auto& [e, c] : a.monos) n = std::max(n, e.size());
    for (const auto& [e, c] : b.monos) n = std::max(n, e.size());
    return n;
}

void add_mono(Poly& p, std::vector<unsigned> e, std::int64_t c) {
    while (!e.empty() && e.back() == 0) e.pop_back();
    auto it = p.monos.find(e);
    if (it == p.monos.end()) {
        if (c != 0) p.monos.emplace(std::move(e), c);
    } else {
        it->second += c;
        if (it->second == 0) p.monos.erase(it);
    }
}

}  // namespace

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    for (const auto& [e, c] : o.monos) add_mono(r, e, c);
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    Poly r = *this;
    for (const auto& [e, c] : o.monos) add_mono(r, e, -c);
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    Poly r;
    std::size_t n = width(*this, o);
    for (const auto& [e1, c1] : monos)
        for (const auto& [e2, c2] : o.monos) {
            auto a = pad(e1, n);
            auto b = pad(e2, n);
            for (std::size_t i = 0; i < n; ++i) a[i] += b[i];
            add_mono(r, a, c1 * c2);
        }
    return r;
}

Poly Poly::compose(const std::vector<Poly>& args) const {
    Poly r;
    for (const auto& [e, c] : monos) {
        Poly m = Poly::constant(c);
        for (std::size_t i = 0; i < e.size(); ++i)
            for (unsigned k = 0; k < e[i]; ++k) m = m * args.at(i);
        r = r + m;
    }
    return r;
}

Poly Poly::shift(std::int64_t a) const {
    std::size_t n = 0;
    for (const auto& [e, c] : monos) n = std::max(n, e.size());
    std::vector<Poly> args;
    for (std::size_t i = 0; i < n; ++i)
        args.push_back(Poly::variable(i, n) + Poly::constant(a));
    return compose(args);
}

std::int64_t Poly::eval(const std::vector<std::int64_t>& xs) const {
    std::int64_t r = 0;
    for (const auto& [e, c] : monos) {
        std::int64_t m = c;
        for (std::size_t i = 0; i < e.size(); ++i)
            for (unsigned k = 0; k < e[i]; ++k) m *= xs.at(i);
        r += m;
    }
    return r;
}

std::string Poly::str(const std::vector<std::string>& names) const {
    if (monos.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : monos) {
        if (!first) os << " + ";
        first = false;
        bool printed = false;
        if (c != 1 || e.empty() || std::all_of(e.begin(), e.end(), [](unsigned k) { return k == 0; })) {
            os << c;
            printed = true;
        }
        for (std::size_t i = 0; i < e.size(); ++i)
            for (unsigned k = 0; k < e[i]; ++k) {
                if (printed) os << "*";
                os << names.at(i);
                printed = true;
            }
    }
    return os.str();
}

bool poly_interp_valid(const PolyInterp& i, const Signature& sig) {
    if (i.min_value < 1) return false;
    for (const auto& [f, ar] : sig.symbols) {
        auto it = i.interp.find(f);
        if (it == i.interp.end()) return false;
        const Poly& p = it->second;
        // every variable occurs in a monomial with nonzero coefficient
        for (int v = 0; v < ar; ++v) {
            bool occurs = false;
            for (const auto& [e, c] : p.monos)
                if (static_cast<std::size_t>(v) < e.size() && e[v] > 0 && c != 0) occurs = true;
            if (!occurs) return false;
        }
        for (const auto& [e, c] : p.monos) {
            if (c < 0) return false;
            if (e.size() > static_cast<std::size_t>(ar)) return false;
        }
        if (ar == 0 && p.eval({}) < i.min_value) return false;
    }
    return true;
}

namespace {

Poly term_poly(const PolyInterp& i, const TermPtr& t, const std::map<std::string, std::size_t>& vi,
               std::size_t nvars) {
    if (t->var) return Poly::variable(vi.at(t->name), nvars);
    std::vector<Poly> args;
    for (const auto& a : t->args) args.push_back(term_poly(i, a, vi, nvars));
    return i.interp.at(t->name).compose(args);
}

}  // namespace

PolyOutcome poly_certifies(const PolyInterp& i, const Trs& r) {
    if (!poly_interp_valid(i, r.sig))
        throw std::invalid_argument("polynomial interpretation violates strictness invariants");
    for (const auto& rule : r.rules) {
        std::map<std::string, std::size_t> vi;
        for (const auto& v : fo::vars(rule.lhs)) vi.emplace(v, vi.size());
        std::size_t n = vi.size();
        Poly diff = term_poly(i, rule.lhs, vi, n) - term_poly(i, rule.rhs, vi, n);
        Poly shifted = diff.shift(i.min_value);
        bool ok = true;
        std::int64_t constant = 0;
        for (const auto& [e, c] : shifted.monos) {
            bool is_const = std::all_of(e.begin(), e.end(), [](unsigned k) { return k == 0; });
            if (is_const)
                constant = c;
            else if (c < 0)
                ok = false;
        }
        if (!ok || constant <= 0) return PolyUnknown{rule};
    }
    return PolyCertified{};
}

std::int64_t poly_eval_term(const PolyInterp& i, const TermPtr& t,
                            const std::map<std::string, std::int64_t>& env) {
    if (t->var) return env.at(t->name);
    std::vector<std::int64_t> args;
    for (const auto& a : t->args) args.push_back(poly_eval_term(i, a, env));
    return i.interp.at(t->name).eval(args);
}

// ------------------------------------------------------------- critical pairs

namespace {

TermPtr rename_vars(const TermPtr& t, const std::string& prefix,
                    std::map<std::string, std::string>& m) {
    if (t->var) {
        auto it = m.find(t->name);
        if (it == m.end()) it = m.emplace(t->name, prefix + std::to_string(m.size())).first;
        return Term::mk_var(it->second);
    }
    std::vector<TermPtr> as;
    for (const auto& a : t->args) as.push_back(rename_vars(a, prefix, m));
    return Term::mk_app(t->name, std::move(as));
}

Rule rename_rule(const Rule& r, const std::string& prefix) {
    std::map<std::string, std::string> m;
    return Rule{rename_vars(r.lhs, prefix, m), rename_vars(r.rhs, prefix, m)};
}

void overlaps_at(const Rule& r1, const Rule& r2, const TermPtr& sub,
                 std::vector<std::size_t>& pos, bool allow_root,
                 std::vector<CriticalPair>& out) {
    if (sub->var) return;
    if (allow_root || !pos.empty()) {
        fo::EqSystem e{{sub, r2.lhs}};
        if (auto s = fo::unify(e)) {
            TermPtr peak = fo::apply_subst(*s, r1.lhs);
            TermPtr left = fo::apply_subst(*s, r1.rhs);
            TermPtr right = fo::apply_subst(*s, replace_at(r1.lhs, pos, 0, r2.rhs));
            out.push_back(CriticalPair{peak, left, right});
        }
    }
    for (std::size_t i = 0; i < sub->args.size(); ++i) {
        pos.push_back(i);
        overlaps_at(r1, r2, sub->args[i], pos, allow_root, out);
        pos.pop_back();
    }
}

std::vector<CriticalPair> critical_pairs_of(const std::vector<Rule>& rules) {
    std::vector<CriticalPair> out;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        for (std::size_t j = 0; j < rules.size(); ++j) {
            Rule r1 = rename_rule(rules[i], "_l");
            Rule r2 = rename_rule(rules[j], "_r");
            std::vector<std::size_t> pos;
            // root self-overlap of a rule with itself is trivial
            bool allow_root = i != j;
            overlaps_at(r1, r2, r1.lhs, pos, allow_root, out);
        }
    }
    return out;
}

std::vector<CriticalPair> pairs_between(const Rule& a, const Rule& b, bool same_rule) {
    std::vector<CriticalPair> out;
    Rule r1 = rename_rule(a, "_l");
    Rule r2 = rename_rule(b, "_r");
    std::vector<std::size_t> pos;
    overlaps_at(r1, r2, r1.lhs, pos, /*allow_root=*/!same_rule, out);
    return out;
}

}  // namespace

std::vector<CriticalPair> critical_pairs(const Trs& r) {
    return critical_pairs_of(r.rules);
}

namespace {

struct TermSet {
    std::vector<TermPtr> items;

    bool insert(const TermPtr& t) {
        for (const auto& u : items)
            if (fo::term_eq(u, t)) return false;
        items.push_back(t);
        return true;
    }
    bool contains(const TermPtr& t) const {
        for (const auto& u : items)
            if (fo::term_eq(u, t)) return true;
        return false;
    }
};

struct Closure {
    TermSet seen;
    std::vector<TermPtr> frontier;
    bool complete = false;
};

void expand(const Trs& r, Closure& c, std::size_t max_size) {
    std::vector<TermPtr> next;
    for (const auto& t : c.frontier)
        for (const auto& u : rewrite_all(r, t))
            if (c.seen.insert(u)) next.push_back(u);
    c.frontier = std::move(next);
    if (c.frontier.empty()) c.complete = true;
    if (c.seen.items.size() > max_size) c.frontier.clear();  // budget: stop, incomplete
}

bool intersects(const Closure& a, const Closure& b) {
    for (const auto& t : a.seen.items)
        if (b.seen.contains(t)) return true;
    return false;
}

constexpr std::size_t kClosureCap = 4000;

}  // namespace

bool joinable(const Trs& r, const TermPtr& a, const TermPtr& b, std::size_t fuel) {
    Closure ca, cb;
    ca.seen.insert(a);
    ca.frontier = {a};
    cb.seen.insert(b);
    cb.frontier = {b};
    if (intersects(ca, cb)) return true;
    for (std::size_t level = 0; level < fuel; ++level) {
        if (ca.frontier.empty() && cb.frontier.empty()) break;
        expand(r, ca, kClosureCap);
        expand(r, cb, kClosureCap);
        if (intersects(ca, cb)) return true;
    }
    return false;
}

ConfluenceOutcome check_local_confluence(const Trs& r, std::size_t fuel) {
    for (const auto& cp : critical_pairs(r)) {
        Closure ca, cb;
        ca.seen.insert(cp.left);
        ca.frontier = {cp.left};
        cb.seen.insert(cp.right);
        cb.frontier = {cp.right};
        bool joined = intersects(ca, cb);
        for (std::size_t level = 0; level < fuel && !joined; ++level) {
            if (ca.frontier.empty() && cb.frontier.empty()) break;
            expand(r, ca, kClosureCap);
            expand(r, cb, kClosureCap);
            joined = intersects(ca, cb);
        }
        if (joined) continue;
        if (ca.complete && cb.complete) return NotJoinable{cp};
        return Inconclusive{cp};
    }
    return LocallyConfluent{};
}

// ------------------------------------------------------------------ completion

namespace {

Rule canonical_rule(const Rule& r) {
    auto both = fo::canonical_rename_all({r.lhs, r.rhs});
    return Rule{both[0], both[1]};
}

bool same_rule(const Rule& a, const Rule& b) {
    return fo::term_eq(a.lhs, b.lhs) && fo::term_eq(a.rhs, b.rhs);
}

struct FuelErr {};

TermPtr normalize_budgeted(const Trs& r, const TermPtr& t, std::size_t& fuel) {
    TermPtr cur = t;
    while (true) {
        if (fuel == 0) throw FuelErr{};
        auto next = step_li(r, cur);
        if (!next) return cur;
        cur = *next;
        --fuel;
    }
}

}  // namespace

CompletionOutcome complete(const Trs& r0, const RpoParams& p, const CompletionBudget& budget) {
    for (const auto& rule : r0.rules)
        if (!rpo_greater(p, rule.lhs, rule.rhs))
            throw std::invalid_argument("initial rule not oriented by the given RPO: " +
                                        to_string(rule));
    Trs r{r0.sig, {}};
    for (const auto& rule : r0.rules) {
        Rule c = canonical_rule(rule);
        bool dup = false;
        for (const auto& ex : r.rules) dup = dup || same_rule(ex, c);
        if (!dup) r.rules.push_back(c);
    }

    std::deque<CriticalPair> queue;
    auto enqueue_batch = [&queue](std::vector<CriticalPair> batch) {
        std::sort(batch.begin(), batch.end(), [](const CriticalPair& a, const CriticalPair& b) {
            auto sz = [](const CriticalPair& c) {
                return fo::term_size(c.left) + fo::term_size(c.right);
            };
            auto sa = sz(a), sb = sz(b);
            if (sa != sb) return sa < sb;
            return fo::to_string(a.left) + fo::to_string(a.right) <
                   fo::to_string(b.left) + fo::to_string(b.right);
        });
        for (auto& cp : batch) queue.push_back(std::move(cp));
    };
    enqueue_batch(critical_pairs(r));

    std::size_t fuel = budget.fuel;
    try {
        while (!queue.empty()) {
            CriticalPair cp = queue.front();
            queue.pop_front();
            TermPtr a = normalize_budgeted(r, cp.left, fuel);
            TermPtr b = normalize_budgeted(r, cp.right, fuel);
            if (fo::term_eq(a, b)) continue;
            Rule nr;
            if (rpo_greater(p, a, b))
                nr = Rule{a, b};
            else if (rpo_greater(p, b, a))
                nr = Rule{b, a};
            else
                return FailedToOrient{cp};
            nr = canonical_rule(nr);
            bool dup = false;
            for (const auto& ex : r.rules) dup = dup || same_rule(ex, nr);
            if (dup) continue;
            if (r.rules.size() + 1 > budget.max_rules) return BudgetExceeded{};

            // inter-reduction against the new rule
            Trs with_new{r.sig, r.rules};
            with_new.rules.push_back(nr);
            std::vector<Rule> kept;
            std::vector<CriticalPair> requeued;
            Trs only_new{r.sig, {nr}};
            for (const auto& old : r.rules) {
                auto lhs_reducts = rewrite_all(only_new, old.lhs);
                if (!lhs_reducts.empty()) {
                    // the collapsed rule's equation re-enters as a pending pair
                    requeued.push_back(CriticalPair{old.lhs, lhs_reducts.front(), old.rhs});
                    continue;
                }
                TermPtr nrhs = normalize_budgeted(with_new, old.rhs, fuel);
                kept.push_back(canonical_rule(Rule{old.lhs, nrhs}));
            }
            r.rules = std::move(kept);
            std::vector<CriticalPair> batch;
            for (std::size_t i = 0; i < r.rules.size(); ++i) {
                for (auto& cp2 : pairs_between(r.rules[i], nr, false))
                    batch.push_back(std::move(cp2));
                for (auto& cp2 : pairs_between(nr, r.rules[i], false))
                    batch.push_back(std::move(cp2));
            }
            for (auto& cp2 : pairs_between(nr, nr, true)) batch.push_back(std::move(cp2));
            r.rules.push_back(nr);
            for (auto& cp2 : requeued) batch.push_back(std::move(cp2));
            enqueue_batch(std::move(batch));
        }
    } catch (const FuelErr&) {
        return BudgetExceeded{};
    }
    return Completed{r};
}

// ------------------------------------------------------------------------ files

TrsParseResult parse_trs(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    Trs trs;
    bool have_sig = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto notspace = [](unsigned char c) { return !std::isspace(c); };
        if (std::find_if(line.begin(), line.end(), notspace) == line.end()) continue;
        if (!have_sig) {
            auto colon = line.find(':');
            if (colon == std::string::npos || line.substr(0, colon).find("sig") == std::string::npos)
                return {std::nullopt, "expected `sig:` header", lineno};
            std::istringstream ss(line.substr(colon + 1));
            std::string item;
            while (ss >> item) {
                auto slash = item.rfind('/');
                if (slash == std::string::npos)
                    return {std::nullopt, "expected name/arity in sig", lineno};
                try {
                    trs.sig.symbols[item.substr(0, slash)] = std::stoi(item.substr(slash + 1));
                } catch (...) {
                    return {std::nullopt, "bad arity in sig", lineno};
                }
            }
            have_sig = true;
            continue;
        }
        auto arrow = line.find("->");
        if (arrow == std::string::npos)
            return {std::nullopt, "expected `l -> r` rule", lineno};
        fo::ParseError err;
        auto l = fo::parse_term(trs.sig, line.substr(0, arrow), &err);
        if (!l) return {std::nullopt, "lhs: " + err.message, lineno};
        auto rr = fo::parse_term(trs.sig, line.substr(arrow + 2), &err);
        if (!rr) return {std::nullopt, "rhs: " + err.message, lineno};
        Rule rule{*l, *rr};
        if (!rule_well_formed(rule))
            return {std::nullopt, "rule violates var(r) ⊆ var(l) or variable lhs", lineno};
        trs.rules.push_back(rule);
    }
    if (!have_sig) return {std::nullopt, "missing sig: header", 0};
    return {trs, "", 0};
}

std::string to_string(const Rule& r) {
    return fo::to_string(r.lhs) + " -> " + fo::to_string(r.rhs);
}

std::string to_string(const Trs& r) {
    std::ostringstream os;
    os << "sig:";
    for (const auto& [f, ar] : r.sig.symbols) os << ' ' << f << '/' << ar;
    os << '\n';
    for (const auto& rule : r.rules) os << to_string(rule) << '\n';
    return os.str();
}

}  // namespace opsem::trs
