#include "opsem/imp.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace opsem::imp {

ExprPtr Expr::var(std::string x) {
    return std::make_shared<Expr>(Expr{Var, std::move(x), 0, nullptr, nullptr});
}
ExprPtr Expr::lit(std::int64_t n) {
    return std::make_shared<Expr>(Expr{Num, "", n, nullptr, nullptr});
}
ExprPtr Expr::add(ExprPtr a, ExprPtr b) {
    return std::make_shared<Expr>(Expr{Add, "", 0, std::move(a), std::move(b)});
}

StmtPtr Stmt::skip() {
    return std::make_shared<Stmt>(Stmt{Skip, "", nullptr, {}, nullptr, nullptr});
}
StmtPtr Stmt::assign(std::string x, ExprPtr e) {
    return std::make_shared<Stmt>(Stmt{Assign, std::move(x), std::move(e), {}, nullptr, nullptr});
}
StmtPtr Stmt::seq(StmtPtr a, StmtPtr b) {
    return std::make_shared<Stmt>(Stmt{Seq, "", nullptr, {}, std::move(a), std::move(b)});
}
StmtPtr Stmt::ifte(Cond b, StmtPtr t, StmtPtr e) {
    return std::make_shared<Stmt>(Stmt{If, "", nullptr, std::move(b), std::move(t), std::move(e)});
}
StmtPtr Stmt::wh(Cond b, StmtPtr body) {
    return std::make_shared<Stmt>(Stmt{While, "", nullptr, std::move(b), std::move(body), nullptr});
}

std::int64_t eval_expr(const ExprPtr& e, const State& s) {
    switch (e->kind) {
        case Expr::Var: return s.get(e->name);
        case Expr::Num: return e->num;
        case Expr::Add: return eval_expr(e->lhs, s) + eval_expr(e->rhs, s);
    }
    return 0;
}

bool eval_cond(const Cond& b, const State& s) {
    return eval_expr(b.lhs, s) < eval_expr(b.rhs, s);
}

// ------------------------------------------------------------------ big step

namespace {

struct OutOfFuel {};

State big_stmt(const StmtPtr& st, State s, std::size_t& fuel) {
    if (fuel == 0) throw OutOfFuel{};
    --fuel;
    switch (st->kind) {
        case Stmt::Skip: return s;
        case Stmt::Assign: {
            std::int64_t v = eval_expr(st->expr, s);
            s.set(st->var, v);
            return s;
        }
        case Stmt::Seq: {
            State mid = big_stmt(st->s1, std::move(s), fuel);
            return big_stmt(st->s2, std::move(mid), fuel);
        }
        case Stmt::If:
            return eval_cond(st->cond, s) ? big_stmt(st->s1, std::move(s), fuel)
                                          : big_stmt(st->s2, std::move(s), fuel);
        case Stmt::While:
            if (!eval_cond(st->cond, s)) return s;
            return big_stmt(Stmt::seq(st->s1, st), std::move(s), fuel);
    }
    return s;
}

}  // namespace

BigResult eval_big(const ImpProg& p, const State& s, std::size_t fuel) {
    try {
        return Done{big_stmt(p.body, s, fuel)};
    } catch (const OutOfFuel&) {
        return FuelExhausted{};
    }
}

// ---------------------------------------------------------------- small step

std::optional<Config> step_small(const Config& c) {
    const StmtPtr& st = c.stmt;
    switch (st->kind) {
        case Stmt::Skip:
            if (c.cont.empty()) return std::nullopt;  // (skip, halt, s)
            {
                Config n{c.cont.front(), {c.cont.begin() + 1, c.cont.end()}, c.state};
                return n;
            }
        case Stmt::Assign: {
            State s2 = c.state;
            s2.set(st->var, eval_expr(st->expr, c.state));
            return Config{Stmt::skip(), c.cont, std::move(s2)};
        }
        case Stmt::Seq: {
            Continuation k;
            k.reserve(c.cont.size() + 1);
            k.push_back(st->s2);
            k.insert(k.end(), c.cont.begin(), c.cont.end());
            return Config{st->s1, std::move(k), c.state};
        }
        case Stmt::If:
            return Config{eval_cond(st->cond, c.state) ? st->s1 : st->s2, c.cont, c.state};
        case Stmt::While:
            if (eval_cond(st->cond, c.state)) {
                Continuation k;
                k.reserve(c.cont.size() + 1);
                k.push_back(st);
                k.insert(k.end(), c.cont.begin(), c.cont.end());
                return Config{st->s1, std::move(k), c.state};
            }
            return Config{Stmt::skip(), c.cont, c.state};
    }
    return std::nullopt;
}

SmallResult run_small(const ImpProg& p, const State& s, std::size_t fuel) {
    Config c{p.body, {}, s};
    for (std::size_t i = 0; i < fuel; ++i) {
        auto n = step_small(c);
        if (!n) return SmallDone{c.state};
        c = std::move(*n);
    }
    if (!step_small(c)) return SmallDone{c.state};
    return SmallFuel{};
}

// ----------------------------------------------------------------------- vm

namespace {

void emit_expr(const ExprPtr& e, VmCode& out) {
    switch (e->kind) {
        case Expr::Var:
            out.push_back(Instr{Instr::VarLoad, 0, e->name, 0});
            return;
        case Expr::Num:
            out.push_back(Instr{Instr::Cnst, e->num, "", 0});
            return;
        case Expr::Add:
            emit_expr(e->lhs, out);
            emit_expr(e->rhs, out);
            out.push_back(Instr{Instr::Add, 0, "", 0});
            return;
    }
}

// C(e<e', k): evaluate both operands, then bge(k) jumps iff the condition
// is false (see the while/if layouts below).
void emit_cond(const Cond& b, std::int64_t k, VmCode& out) {
    emit_expr(b.lhs, out);
    emit_expr(b.rhs, out);
    out.push_back(Instr{Instr::Bge, 0, "", k});
}

std::size_t cond_size(const Cond& b);

std::size_t expr_size(const ExprPtr& e) {
    switch (e->kind) {
        case Expr::Var:
        case Expr::Num: return 1;
        case Expr::Add: return expr_size(e->lhs) + expr_size(e->rhs) + 1;
    }
    return 0;
}

std::size_t cond_size(const Cond& b) { return expr_size(b.lhs) + expr_size(b.rhs) + 1; }

std::size_t stmt_size(const StmtPtr& s) {
    switch (s->kind) {
        case Stmt::Skip: return 0;
        case Stmt::Assign: return expr_size(s->expr) + 1;
        case Stmt::Seq: return stmt_size(s->s1) + stmt_size(s->s2);
        case Stmt::If: return cond_size(s->cond) + stmt_size(s->s1) + 1 + stmt_size(s->s2);
        case Stmt::While: return cond_size(s->cond) + stmt_size(s->s1) + 1;
    }
    return 0;
}

void emit_stmt(const StmtPtr& s, VmCode& out) {
    switch (s->kind) {
        case Stmt::Skip: return;
        case Stmt::Assign:
            emit_expr(s->expr, out);
            out.push_back(Instr{Instr::SetVar, 0, s->var, 0});
            return;
        case Stmt::Seq:
            emit_stmt(s->s1, out);
            emit_stmt(s->s2, out);
            return;
        case Stmt::If: {
            emit_cond(s->cond, static_cast<std::int64_t>(stmt_size(s->s1)) + 1, out);
            emit_stmt(s->s1, out);
            out.push_back(Instr{Instr::Branch, 0, "", static_cast<std::int64_t>(stmt_size(s->s2))});
            emit_stmt(s->s2, out);
            return;
        }
        case Stmt::While: {
            std::int64_t body = static_cast<std::int64_t>(stmt_size(s->s1));
            std::int64_t back = -(static_cast<std::int64_t>(cond_size(s->cond)) + body + 1);
            emit_cond(s->cond, body + 1, out);
            emit_stmt(s->s1, out);
            out.push_back(Instr{Instr::Branch, 0, "", back});
            return;
        }
    }
}

}  // namespace

VmCode compile_stmt(const StmtPtr& s) {
    VmCode out;
    emit_stmt(s, out);
    return out;
}

VmCode compile(const ImpProg& p) {
    VmCode out = compile_stmt(p.body);
    out.push_back(Instr{Instr::Halt, 0, "", 0});
    return out;
}

VmResult vm_run(const VmCode& c, const State& s0, std::size_t fuel,
                const std::function<void(std::size_t, std::size_t)>& observer) {
    State s = s0;
    std::vector<std::int64_t> stack;
    std::size_t pc = 0;
    for (std::size_t steps = 0;; ++steps) {
        if (pc >= c.size()) return VmStuck{pc};
        if (observer) observer(pc, stack.size());
        const Instr& in = c[pc];
        if (in.op == Instr::Halt) {
            if (stack.empty()) return VmDone{s};
            return VmStuck{pc};
        }
        if (steps >= fuel) return VmFuel{};
        switch (in.op) {
            case Instr::Cnst:
                stack.push_back(in.n);
                ++pc;
                break;
            case Instr::VarLoad:
                stack.push_back(s.get(in.x));
                ++pc;
                break;
            case Instr::SetVar:
                if (stack.empty()) return VmStuck{pc};
                s.set(in.x, stack.back());
                stack.pop_back();
                ++pc;
                break;
            case Instr::Add: {
                if (stack.size() < 2) return VmStuck{pc};
                std::int64_t a = stack.back();
                stack.pop_back();
                std::int64_t b = stack.back();
                stack.pop_back();
                stack.push_back(a + b);
                ++pc;
                break;
            }
            case Instr::Branch: {
                std::int64_t t = static_cast<std::int64_t>(pc) + in.k + 1;
                if (t < 0 || t > static_cast<std::int64_t>(c.size())) return VmStuck{pc};
                pc = static_cast<std::size_t>(t);
                break;
            }
            case Instr::Bge: {
                if (stack.size() < 2) return VmStuck{pc};
                std::int64_t second = stack.back();  // value of e'
                stack.pop_back();
                std::int64_t first = stack.back();  // value of e
                stack.pop_back();
                if (first >= second) {  // e < e' is false: jump
                    std::int64_t t = static_cast<std::int64_t>(pc) + in.k + 1;
                    if (t < 0 || t > static_cast<std::int64_t>(c.size())) return VmStuck{pc};
                    pc = static_cast<std::size_t>(t);
                } else {
                    ++pc;
                }
                break;
            }
            case Instr::Halt: break;  // handled above
        }
    }
}

std::optional<std::vector<std::size_t>> check_stack_wf(const VmCode& c) {
    const std::size_t n = c.size();
    std::vector<std::size_t> h(n + 1, 0);
    // h is determined by forward propagation from h(0) = 0
    for (std::size_t i = 0; i < n; ++i) {
        switch (c[i].op) {
            case Instr::Cnst:
            case Instr::VarLoad: h[i + 1] = h[i] + 1; break;
            case Instr::Add:
                if (h[i] < 2) return std::nullopt;
                h[i + 1] = h[i] - 1;
                break;
            case Instr::SetVar:
            case Instr::Branch:
            case Instr::Bge:
            case Instr::Halt: h[i + 1] = 0; break;
        }
    }
    // then every row's conditions are checked
    for (std::size_t i = 0; i < n; ++i) {
        const Instr& in = c[i];
        std::int64_t target = static_cast<std::int64_t>(i) + in.k + 1;
        switch (in.op) {
            case Instr::Cnst:
            case Instr::VarLoad:
                break;
            case Instr::Add:
                if (h[i] < 2) return std::nullopt;
                break;
            case Instr::SetVar:
                if (h[i] != 1) return std::nullopt;
                break;
            case Instr::Branch:
                if (target < 0 || target > static_cast<std::int64_t>(n)) return std::nullopt;
                if (h[i] != 0 || h[i + 1] != 0 || h[target] != 0) return std::nullopt;
                break;
            case Instr::Bge:
                if (target < 0 || target > static_cast<std::int64_t>(n)) return std::nullopt;
                if (h[i] != 2 || h[i + 1] != 0 || h[target] != 0) return std::nullopt;
                break;
            case Instr::Halt:
                if (i != n - 1 || h[i] != 0 || h[i + 1] != 0) return std::nullopt;
                break;
        }
    }
    return h;
}

// ------------------------------------------------------------------ assertions

AssertPtr Assertion::tru() {
    return std::make_shared<Assertion>(Assertion{True, nullptr, nullptr, nullptr, nullptr});
}
AssertPtr Assertion::fls() {
    return std::make_shared<Assertion>(Assertion{False, nullptr, nullptr, nullptr, nullptr});
}
AssertPtr Assertion::less(ExprPtr a, ExprPtr b) {
    return std::make_shared<Assertion>(Assertion{Less, std::move(a), std::move(b), nullptr, nullptr});
}
AssertPtr Assertion::equal(ExprPtr a, ExprPtr b) {
    return std::make_shared<Assertion>(Assertion{Equal, std::move(a), std::move(b), nullptr, nullptr});
}
AssertPtr Assertion::neg(AssertPtr a) {
    return std::make_shared<Assertion>(Assertion{Not, nullptr, nullptr, std::move(a), nullptr});
}
AssertPtr Assertion::con(AssertPtr a, AssertPtr b) {
    return std::make_shared<Assertion>(Assertion{And, nullptr, nullptr, std::move(a), std::move(b)});
}
AssertPtr Assertion::dis(AssertPtr a, AssertPtr b) {
    return std::make_shared<Assertion>(Assertion{Or, nullptr, nullptr, std::move(a), std::move(b)});
}

bool assert_holds(const AssertPtr& a, const State& s) {
    switch (a->kind) {
        case Assertion::True: return true;
        case Assertion::False: return false;
        case Assertion::Less: return eval_expr(a->e1, s) < eval_expr(a->e2, s);
        case Assertion::Equal: return eval_expr(a->e1, s) == eval_expr(a->e2, s);
        case Assertion::Not: return !assert_holds(a->a1, s);
        case Assertion::And: return assert_holds(a->a1, s) && assert_holds(a->a2, s);
        case Assertion::Or: return assert_holds(a->a1, s) || assert_holds(a->a2, s);
    }
    return false;
}

ExprPtr subst_expr(const ExprPtr& e, const std::string& x, const ExprPtr& by) {
    switch (e->kind) {
        case Expr::Var: return e->name == x ? by : e;
        case Expr::Num: return e;
        case Expr::Add: return Expr::add(subst_expr(e->lhs, x, by), subst_expr(e->rhs, x, by));
    }
    return e;
}

AssertPtr subst_assert(const AssertPtr& a, const std::string& x, const ExprPtr& by) {
    switch (a->kind) {
        case Assertion::True:
        case Assertion::False: return a;
        case Assertion::Less:
            return Assertion::less(subst_expr(a->e1, x, by), subst_expr(a->e2, x, by));
        case Assertion::Equal:
            return Assertion::equal(subst_expr(a->e1, x, by), subst_expr(a->e2, x, by));
        case Assertion::Not: return Assertion::neg(subst_assert(a->a1, x, by));
        case Assertion::And:
            return Assertion::con(subst_assert(a->a1, x, by), subst_assert(a->a2, x, by));
        case Assertion::Or:
            return Assertion::dis(subst_assert(a->a1, x, by), subst_assert(a->a2, x, by));
    }
    return a;
}

AssertPtr wp(const StmtPtr& s, const AssertPtr& post) {
    switch (s->kind) {
        case Stmt::Skip: return post;
        case Stmt::Assign: return subst_assert(post, s->var, s->expr);
        case Stmt::Seq: return wp(s->s1, wp(s->s2, post));
        case Stmt::If: {
            AssertPtr b = Assertion::less(s->cond.lhs, s->cond.rhs);
            return Assertion::dis(Assertion::con(b, wp(s->s1, post)),
                                  Assertion::con(Assertion::neg(b), wp(s->s2, post)));
        }
        case Stmt::While:
            throw std::invalid_argument("wp: statement contains a while loop");
    }
    return post;
}

// ---------------------------------------------------------------------- text

std::string to_string(const ExprPtr& e) {
    switch (e->kind) {
        case Expr::Var: return e->name;
        case Expr::Num: return std::to_string(e->num);
        case Expr::Add: return "(" + to_string(e->lhs) + " + " + to_string(e->rhs) + ")";
    }
    return "";
}

std::string to_string(const Cond& b) {
    return to_string(b.lhs) + " < " + to_string(b.rhs);
}

std::string to_string(const StmtPtr& s) {
    switch (s->kind) {
        case Stmt::Skip: return "skip";
        case Stmt::Assign: return s->var + " := " + to_string(s->expr);
        case Stmt::Seq: return to_string(s->s1) + "; " + to_string(s->s2);
        case Stmt::If:
            return "if " + to_string(s->cond) + " then { " + to_string(s->s1) + " } else { " +
                   to_string(s->s2) + " }";
        case Stmt::While:
            return "while " + to_string(s->cond) + " do { " + to_string(s->s1) + " }";
    }
    return "";
}

std::string to_string(const ImpProg& p) { return to_string(p.body); }

std::string to_string(const Instr& i) {
    switch (i.op) {
        case Instr::Cnst: return "cnst(" + std::to_string(i.n) + ")";
        case Instr::VarLoad: return "var(" + i.x + ")";
        case Instr::SetVar: return "setvar(" + i.x + ")";
        case Instr::Add: return "add";
        case Instr::Branch: return "branch(" + std::to_string(i.k) + ")";
        case Instr::Bge: return "bge(" + std::to_string(i.k) + ")";
        case Instr::Halt: return "halt";
    }
    return "";
}

std::string to_string(const VmCode& c) {
    std::ostringstream os;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) os << ' ';
        os << to_string(c[i]);
    }
    return os.str();
}

std::string to_string(const AssertPtr& a) {
    switch (a->kind) {
        case Assertion::True: return "true";
        case Assertion::False: return "false";
        case Assertion::Less: return "(" + to_string(a->e1) + " < " + to_string(a->e2) + ")";
        case Assertion::Equal: return "(" + to_string(a->e1) + " = " + to_string(a->e2) + ")";
        case Assertion::Not: return "!" + to_string(a->a1);
        case Assertion::And: return "(" + to_string(a->a1) + " /\\ " + to_string(a->a2) + ")";
        case Assertion::Or: return "(" + to_string(a->a1) + " \\/ " + to_string(a->a2) + ")";
    }
    return "";
}

// --------------------------------------------------------------------- parser

namespace {

struct Lexer {
    const std::string& s;
    std::size_t i = 0, line = 1, col = 1;

    void advance(std::size_t n) {
        for (std::size_t k = 0; k < n && i < s.size(); ++k, ++i) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    }
    void skip() {
        while (i < s.size()) {
            if (std::isspace(static_cast<unsigned char>(s[i]))) {
                advance(1);
            } else if (s[i] == '#') {
                while (i < s.size() && s[i] != '\n') advance(1);
            } else {
                break;
            }
        }
    }
    bool eat(const std::string& tok) {
        skip();
        if (s.compare(i, tok.size(), tok) == 0) {
            // keywords must not be a prefix of a longer identifier
            if (std::isalpha(static_cast<unsigned char>(tok[0]))) {
                std::size_t j = i + tok.size();
                if (j < s.size() &&
                    (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                    return false;
            }
            advance(tok.size());
            return true;
        }
        return false;
    }
    std::optional<std::string> ident() {
        skip();
        std::size_t j = i;
        if (j >= s.size() || !(std::isalpha(static_cast<unsigned char>(s[j])) || s[j] == '_'))
            return std::nullopt;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
        std::string r = s.substr(i, j - i);
        if (r == "skip" || r == "if" || r == "then" || r == "else" || r == "while" || r == "do" ||
            r == "true" || r == "false")
            return std::nullopt;
        advance(j - i);
        return r;
    }
    std::optional<std::int64_t> number() {
        skip();
        std::size_t j = i;
        bool neg = false;
        if (j < s.size() && (s[j] == '-' || s[j] == '+')) {
            neg = s[j] == '-';
            ++j;
        }
        std::size_t d = j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (d == j) return std::nullopt;
        std::int64_t v = std::stoll(s.substr(d, j - d));
        advance(j - i);
        return neg ? -v : v;
    }
};

struct ImpParser {
    Lexer lx;
    std::string error;
    std::size_t eline = 0, ecol = 0;

    bool fail(const std::string& msg) {
        if (error.empty()) {
            error = msg;
            eline = lx.line;
            ecol = lx.col;
        }
        return false;
    }

    ExprPtr atom() {
        if (lx.eat("(")) {
            ExprPtr e = expr();
            if (!e) return nullptr;
            if (!lx.eat(")")) {
                fail("expected ')'");
                return nullptr;
            }
            return e;
        }
        if (auto n = lx.number()) return Expr::lit(*n);
        if (auto id = lx.ident()) return Expr::var(*id);
        fail("expected expression");
        return nullptr;
    }

    ExprPtr expr() {
        ExprPtr e = atom();
        if (!e) return nullptr;
        while (lx.eat("+")) {
            ExprPtr r = atom();
            if (!r) return nullptr;
            e = Expr::add(e, r);
        }
        return e;
    }

    struct Mark {
        std::size_t i, line, col;
        std::string error;
        std::size_t eline, ecol;
    };
    Mark mark() const { return {lx.i, lx.line, lx.col, error, eline, ecol}; }
    void rewind(const Mark& m) {
        lx.i = m.i;
        lx.line = m.line;
        lx.col = m.col;
        error = m.error;
        eline = m.eline;
        ecol = m.ecol;
    }

    std::optional<Cond> cond() {
        Mark m = mark();
        if (lx.eat("(")) {
            auto inner = cond();
            if (inner && lx.eat(")")) return inner;
            rewind(m);
        }
        ExprPtr l = expr();
        if (!l) return std::nullopt;
        if (!lx.eat("<")) {
            fail("expected '<'");
            return std::nullopt;
        }
        ExprPtr r = expr();
        if (!r) return std::nullopt;
        return Cond{l, r};
    }

    StmtPtr atom_stmt() {
        if (lx.eat("skip")) return Stmt::skip();
        if (lx.eat("if")) {
            auto b = cond();
            if (!b) return nullptr;
            if (!lx.eat("then")) {
                fail("expected 'then'");
                return nullptr;
            }
            StmtPtr t = atom_stmt();
            if (!t) return nullptr;
            if (!lx.eat("else")) {
                fail("expected 'else'");
                return nullptr;
            }
            StmtPtr e = atom_stmt();
            if (!e) return nullptr;
            return Stmt::ifte(*b, t, e);
        }
        if (lx.eat("while")) {
            auto b = cond();
            if (!b) return nullptr;
            if (!lx.eat("do")) {
                fail("expected 'do'");
                return nullptr;
            }
            StmtPtr s = atom_stmt();
            if (!s) return nullptr;
            return Stmt::wh(*b, s);
        }
        if (lx.eat("(")) {
            StmtPtr s = stmt();
            if (!s) return nullptr;
            if (!lx.eat(")")) {
                fail("expected ')'");
                return nullptr;
            }
            return s;
        }
        if (lx.eat("{")) {
            StmtPtr s = stmt();
            if (!s) return nullptr;
            if (!lx.eat("}")) {
                fail("expected '}'");
                return nullptr;
            }
            return s;
        }
        if (auto id = lx.ident()) {
            if (!lx.eat(":=")) {
                fail("expected ':='");
                return nullptr;
            }
            ExprPtr e = expr();
            if (!e) return nullptr;
            return Stmt::assign(*id, e);
        }
        fail("expected statement");
        return nullptr;
    }

    StmtPtr stmt() {
        StmtPtr s = atom_stmt();
        if (!s) return nullptr;
        while (lx.eat(";")) {
            lx.skip();
            if (lx.i >= lx.s.size() || lx.s[lx.i] == ')' || lx.s[lx.i] == '}') break;
            StmtPtr r = atom_stmt();
            if (!r) return nullptr;
            s = Stmt::seq(s, r);
        }
        return s;
    }
};

}  // namespace

ImpParseResult parse_imp(const std::string& src) {
    ImpParser p{Lexer{src}, "", 0, 0};
    StmtPtr s = p.stmt();
    p.lx.skip();
    if (s && p.lx.i != src.size()) {
        p.fail("trailing input");
        s = nullptr;
    }
    if (!s) return {std::nullopt, p.error, p.eline, p.ecol};
    return {ImpProg{s}, "", 0, 0};
}

namespace {

struct AssertParser {
    Lexer lx;
    std::string error;

    bool fail(const std::string& m) {
        if (error.empty()) error = m;
        return false;
    }

    ExprPtr expr() {
        ImpParser sub{lx, "", 0, 0};
        ExprPtr e = sub.expr();
        lx.i = sub.lx.i;
        lx.line = sub.lx.line;
        lx.col = sub.lx.col;
        if (!e) fail(sub.error.empty() ? "expected expression" : sub.error);
        return e;
    }

    AssertPtr atom() {
        if (lx.eat("true")) return Assertion::tru();
        if (lx.eat("false")) return Assertion::fls();
        if (lx.eat("!") || lx.eat("~")) {
            AssertPtr a = atom();
            return a ? Assertion::neg(a) : nullptr;
        }
        if (lx.eat("(")) {
            AssertPtr a = formula();
            if (!a) return nullptr;
            if (!lx.eat(")")) {
                fail("expected ')'");
                return nullptr;
            }
            return a;
        }
        ExprPtr l = expr();
        if (!l) return nullptr;
        if (lx.eat("<")) {
            ExprPtr r = expr();
            return r ? Assertion::less(l, r) : nullptr;
        }
        if (lx.eat("=")) {
            ExprPtr r = expr();
            return r ? Assertion::equal(l, r) : nullptr;
        }
        fail("expected '<' or '='");
        return nullptr;
    }

    AssertPtr formula() {
        AssertPtr a = atom();
        if (!a) return nullptr;
        while (true) {
            if (lx.eat("/\\")) {
                AssertPtr b = atom();
                if (!b) return nullptr;
                a = Assertion::con(a, b);
            } else if (lx.eat("\\/")) {
                AssertPtr b = atom();
                if (!b) return nullptr;
                a = Assertion::dis(a, b);
            } else {
                break;
            }
        }
        return a;
    }
};

}  // namespace

std::optional<AssertPtr> parse_assertion(const std::string& src, std::string* err) {
    AssertParser p{Lexer{src}, ""};
    AssertPtr a = p.formula();
    p.lx.skip();
    if (a && p.lx.i != src.size()) {
        p.fail("trailing input");
        a = nullptr;
    }
    if (!a) {
        if (err) *err = p.error;
        return std::nullopt;
    }
    return a;
}

}  // namespace opsem::imp
