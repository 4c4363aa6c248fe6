#include "tmprob/spec_lang.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tmprob::spec {

const char* type_name(Type t) {
    switch (t) {
        case Type::Int: return "int";
        case Type::Bool: return "bool";
        case Type::IntSeq: return "seq<int>";
    }
    return "?";
}

const char* error_category_name(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::Lexical: return "lexical error";
        case ErrorCategory::Syntax: return "syntax error";
        case ErrorCategory::UnknownIdentifier: return "unknown identifier";
        case ErrorCategory::TypeMismatch: return "type mismatch";
    }
    return "error";
}

std::string ParseError::render() const {
    std::ostringstream os;
    os << "line " << line << ", col " << col << ": " << error_category_name(category) << ": "
       << message;
    return os.str();
}

std::vector<Param> Signature::all_vars() const {
    std::vector<Param> out = params;
    out.insert(out.end(), returns.begin(), returns.end());
    return out;
}

const Param* Signature::find(std::string_view name) const {
    for (const auto& p : params)
        if (p.name == name) return &p;
    for (const auto& r : returns)
        if (r.name == name) return &r;
    return nullptr;
}

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok {
    End,
    Ident,
    IntLit,
    // punctuation / operators
    LParen,
    RParen,
    LBracket,
    RBracket,
    Pipe,
    Semi,
    Colon,
    ColonColon,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Bang,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
    AndAnd,
    OrOr,
    Implies,
    Iff,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    long long value = 0;
    int line = 1;
    int col = 1;
};

struct LexFail {
    ParseError err;
};

class Lexer {
   public:
    explicit Lexer(std::string_view src) : src_(src) {}

    // Throws LexFail on bad input.
    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_ws();
            Token t;
            t.line = line_;
            t.col = col_;
            if (pos_ >= src_.size()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            char c = src_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::string digits;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    digits.push_back(take());
                try {
                    t.value = std::stoll(digits);
                } catch (const std::out_of_range&) {
                    fail(t, ErrorCategory::Lexical, "integer literal out of range: " + digits);
                }
                t.kind = Tok::IntLit;
                t.text = digits;
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string id;
                while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                              src_[pos_] == '_'))
                    id.push_back(take());
                t.kind = Tok::Ident;
                t.text = id;
            } else if (!punct(t)) {
                fail(t, ErrorCategory::Lexical,
                     std::string("unexpected character '") + c + "'");
            }
            out.push_back(std::move(t));
        }
    }

   private:
    char take() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) take();
    }

    bool eat(std::string_view s) {
        if (src_.substr(pos_, s.size()) != s) return false;
        for (size_t i = 0; i < s.size(); ++i) take();
        return true;
    }

    bool punct(Token& t) {
        static const std::pair<const char*, Tok> table[] = {
            {"<==>", Tok::Iff},   {"==>", Tok::Implies}, {"==", Tok::EqEq},
            {"!=", Tok::Ne},      {"<=", Tok::Le},       {">=", Tok::Ge},
            {"&&", Tok::AndAnd},  {"||", Tok::OrOr},     {"::", Tok::ColonColon},
            {"<", Tok::Lt},       {">", Tok::Gt},        {"(", Tok::LParen},
            {")", Tok::RParen},   {"[", Tok::LBracket},  {"]", Tok::RBracket},
            {"|", Tok::Pipe},     {";", Tok::Semi},      {":", Tok::Colon},
            {",", Tok::Comma},    {"+", Tok::Plus},      {"-", Tok::Minus},
            {"*", Tok::Star},     {"/", Tok::Slash},     {"%", Tok::Percent},
            {"!", Tok::Bang},
        };
        for (const auto& [s, k] : table) {
            if (eat(s)) {
                t.kind = k;
                t.text = s;
                return true;
            }
        }
        return false;
    }

    [[noreturn]] void fail(const Token& at, ErrorCategory cat, std::string msg) {
        throw LexFail{ParseError{cat, at.line, at.col, std::move(msg)}};
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

using MutExpr = std::shared_ptr<Expr>;

struct ParseFail {
    ParseError err;
};

class Parser {
   public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    SpecPair parse_spec_body() {
        SpecPair sp;
        while (at_keyword("requires")) {
            next();
            sp.preconditions.push_back(parse_expr());
            expect(Tok::Semi, "';' after requires clause");
        }
        while (at_keyword("ensures")) {
            next();
            sp.postconditions.push_back(parse_expr());
            expect(Tok::Semi, "';' after ensures clause");
        }
        expect_end();
        return sp;
    }

    MutExpr parse_single_expr() {
        MutExpr e = parse_expr();
        expect_end();
        return e;
    }

    Signature parse_signature_body() {
        Signature sig;
        expect_keyword("method");
        sig.method_name = expect_ident("method name");
        expect(Tok::LParen, "'(' after method name");
        sig.params = parse_param_list();
        if (at_keyword("returns")) {
            next();
            expect(Tok::LParen, "'(' after returns");
            sig.returns = parse_param_list();
        }
        expect_end();
        std::set<std::string> seen;
        for (const auto& p : sig.all_vars()) {
            if (!seen.insert(p.name).second)
                fail(ErrorCategory::TypeMismatch, "duplicate parameter name '" + p.name + "'");
        }
        return sig;
    }

   private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }
    bool at(Tok k) const { return cur().kind == k; }
    bool at_keyword(std::string_view kw) const {
        return cur().kind == Tok::Ident && cur().text == kw;
    }

    bool accept(Tok k) {
        if (!at(k)) return false;
        next();
        return true;
    }

    void expect(Tok k, const std::string& what) {
        if (!accept(k)) fail(ErrorCategory::Syntax, "expected " + what + describe_cur());
    }

    void expect_keyword(std::string_view kw) {
        if (!at_keyword(kw))
            fail(ErrorCategory::Syntax, "expected '" + std::string(kw) + "'" + describe_cur());
        next();
    }

    std::string expect_ident(const std::string& what) {
        if (!at(Tok::Ident)) fail(ErrorCategory::Syntax, "expected " + what + describe_cur());
        return next().text;
    }

    void expect_end() {
        if (!at(Tok::End))
            fail(ErrorCategory::Syntax, "unexpected trailing input" + describe_cur());
    }

    std::string describe_cur() const {
        if (cur().kind == Tok::End) return " at end of input";
        return ", found '" + cur().text + "'";
    }

    [[noreturn]] void fail(ErrorCategory cat, std::string msg) const {
        throw ParseFail{ParseError{cat, cur().line, cur().col, std::move(msg)}};
    }

    std::vector<Param> parse_param_list() {
        std::vector<Param> out;
        if (accept(Tok::RParen)) return out;
        while (true) {
            Param p;
            p.name = expect_ident("parameter name");
            expect(Tok::Colon, "':' after parameter name");
            p.type = parse_type();
            out.push_back(std::move(p));
            if (accept(Tok::RParen)) return out;
            expect(Tok::Comma, "',' or ')' in parameter list");
        }
    }

    Type parse_type() {
        if (at_keyword("int")) {
            next();
            return Type::Int;
        }
        if (at_keyword("bool")) {
            next();
            return Type::Bool;
        }
        if (at_keyword("seq")) {
            next();
            expect(Tok::Lt, "'<' after seq");
            expect_keyword("int");
            expect(Tok::Gt, "'>' closing seq type");
            return Type::IntSeq;
        }
        fail(ErrorCategory::Syntax, "expected a type (int, bool, or seq<int>)" + describe_cur());
    }

    MutExpr node(ExprKind k) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->line = cur().line;
        e->col = cur().col;
        return e;
    }

    static MutExpr binary(BinaryOp op, MutExpr l, ExprPtr r, int line, int col) {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::Binary;
        e->bin_op = op;
        e->lhs = std::move(l);
        e->rhs = std::move(r);
        e->line = line;
        e->col = col;
        return e;
    }

    MutExpr parse_expr() { return parse_iff(); }

    MutExpr parse_iff() {
        MutExpr l = parse_implies();
        while (at(Tok::Iff)) {
            Token op = next();
            l = binary(BinaryOp::Iff, std::move(l), parse_implies(), op.line, op.col);
        }
        return l;
    }

    MutExpr parse_implies() {
        MutExpr l = parse_or();
        if (at(Tok::Implies)) {
            Token op = next();
            // right-associative
            return binary(BinaryOp::Implies, std::move(l), parse_implies(), op.line, op.col);
        }
        return l;
    }

    MutExpr parse_or() {
        MutExpr l = parse_and();
        while (at(Tok::OrOr)) {
            Token op = next();
            l = binary(BinaryOp::Or, std::move(l), parse_and(), op.line, op.col);
        }
        return l;
    }

    MutExpr parse_and() {
        MutExpr l = parse_not();
        while (at(Tok::AndAnd)) {
            Token op = next();
            l = binary(BinaryOp::And, std::move(l), parse_not(), op.line, op.col);
        }
        return l;
    }

    MutExpr parse_not() {
        if (at(Tok::Bang)) {
            Token op = next();
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::Unary;
            e->un_op = UnaryOp::Not;
            e->lhs = parse_not();
            e->line = op.line;
            e->col = op.col;
            return e;
        }
        return parse_comparison();
    }

    static bool is_cmp(Tok k) {
        return k == Tok::EqEq || k == Tok::Ne || k == Tok::Lt || k == Tok::Le || k == Tok::Gt ||
               k == Tok::Ge;
    }

    static BinaryOp cmp_op(Tok k) {
        switch (k) {
            case Tok::EqEq: return BinaryOp::Eq;
            case Tok::Ne: return BinaryOp::Ne;
            case Tok::Lt: return BinaryOp::Lt;
            case Tok::Le: return BinaryOp::Le;
            case Tok::Gt: return BinaryOp::Gt;
            default: return BinaryOp::Ge;
        }
    }

    // Dafny-style comparison chains: "0 <= j < r" desugars to
    // "0 <= j && j < r". Chains must not mix directions and never contain !=.
    MutExpr parse_comparison() {
        MutExpr first = parse_additive();
        if (!is_cmp(cur().kind)) return first;

        std::vector<MutExpr> operands{std::move(first)};
        std::vector<Token> ops;
        while (is_cmp(cur().kind)) {
            ops.push_back(next());
            operands.push_back(parse_additive());
        }
        if (ops.size() == 1) {
            return binary(cmp_op(ops[0].kind), std::move(operands[0]), operands[1], ops[0].line,
                          ops[0].col);
        }
        bool any_lt = false, any_gt = false;
        for (const Token& t : ops) {
            if (t.kind == Tok::Ne)
                throw ParseFail{ParseError{ErrorCategory::Syntax, t.line, t.col,
                                           "'!=' cannot appear in a comparison chain"}};
            any_lt |= (t.kind == Tok::Lt || t.kind == Tok::Le);
            any_gt |= (t.kind == Tok::Gt || t.kind == Tok::Ge);
        }
        if (any_lt && any_gt)
            throw ParseFail{ParseError{ErrorCategory::Syntax, ops[1].line, ops[1].col,
                                       "comparison chain mixes ascending and descending operators"}};
        MutExpr acc;
        for (size_t i = 0; i < ops.size(); ++i) {
            MutExpr link = binary(cmp_op(ops[i].kind), operands[i], operands[i + 1], ops[i].line,
                                  ops[i].col);
            acc = acc ? binary(BinaryOp::And, std::move(acc), link, ops[i].line, ops[i].col)
                      : std::move(link);
        }
        return acc;
    }

    MutExpr parse_additive() {
        MutExpr l = parse_multiplicative();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            Token op = next();
            BinaryOp b = op.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
            l = binary(b, std::move(l), parse_multiplicative(), op.line, op.col);
        }
        return l;
    }

    MutExpr parse_multiplicative() {
        MutExpr l = parse_unary();
        while (true) {
            BinaryOp b;
            if (at(Tok::Star))
                b = BinaryOp::Mul;
            else if (at(Tok::Slash) || at_keyword("div"))
                b = BinaryOp::Div;
            else if (at(Tok::Percent) || at_keyword("mod"))
                b = BinaryOp::Mod;
            else
                return l;
            Token op = next();
            l = binary(b, std::move(l), parse_unary(), op.line, op.col);
        }
    }

    MutExpr parse_unary() {
        if (at(Tok::Minus)) {
            Token op = next();
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::Unary;
            e->un_op = UnaryOp::Neg;
            e->lhs = parse_unary();
            e->line = op.line;
            e->col = op.col;
            return e;
        }
        if (at_keyword("forall") || at_keyword("exists")) {
            Token kw = next();
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::Quantified;
            e->quant = kw.text == "forall" ? Quantifier::Forall : Quantifier::Exists;
            e->name = expect_ident("quantified variable name");
            expect(Tok::ColonColon, "'::' after quantified variable");
            e->lhs = parse_expr();  // body extends maximally to the right
            e->line = kw.line;
            e->col = kw.col;
            return e;
        }
        return parse_postfix();
    }

    MutExpr parse_postfix() {
        MutExpr e = parse_primary();
        while (at(Tok::LBracket)) {
            Token op = next();
            auto idx = std::make_shared<Expr>();
            idx->kind = ExprKind::SeqIndex;
            idx->lhs = std::move(e);
            idx->rhs = parse_expr();
            idx->line = op.line;
            idx->col = op.col;
            expect(Tok::RBracket, "']' closing sequence index");
            e = std::move(idx);
        }
        return e;
    }

    MutExpr parse_primary() {
        if (at(Tok::IntLit)) {
            auto e = node(ExprKind::IntLit);
            e->int_value = next().value;
            return e;
        }
        if (at_keyword("true") || at_keyword("false")) {
            auto e = node(ExprKind::BoolLit);
            e->bool_value = next().text == "true";
            return e;
        }
        if (at(Tok::Ident)) {
            static const std::set<std::string, std::less<>> reserved = {
                "requires", "ensures", "forall", "exists", "div", "mod",
                "method",   "returns", "int",    "bool",   "seq"};
            if (reserved.count(cur().text))
                fail(ErrorCategory::Syntax, "unexpected keyword '" + cur().text + "'");
            auto e = node(ExprKind::Var);
            e->name = next().text;
            return e;
        }
        if (at(Tok::LParen)) {
            next();
            MutExpr e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        if (at(Tok::Pipe)) {
            auto e = node(ExprKind::SeqLen);
            next();
            e->lhs = parse_expr();
            expect(Tok::Pipe, "'|' closing sequence length");
            return e;
        }
        fail(ErrorCategory::Syntax, "expected an expression" + describe_cur());
    }

    std::vector<Token> toks_;
    size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Typechecker
// ---------------------------------------------------------------------------

struct TypeFail {
    ParseError err;
};

class TypeChecker {
   public:
    TypeChecker(const Signature& sig, bool allow_returns) {
        for (const auto& p : sig.params) scope_[p.name] = p.type;
        if (allow_returns)
            for (const auto& r : sig.returns) scope_[r.name] = r.type;
    }

    // Fills in e->type throughout; throws TypeFail.
    Type check(Expr& e) {
        switch (e.kind) {
            case ExprKind::IntLit: return set(e, Type::Int);
            case ExprKind::BoolLit: return set(e, Type::Bool);
            case ExprKind::Var: {
                auto it = scope_.find(e.name);
                if (it == scope_.end())
                    throw TypeFail{ParseError{ErrorCategory::UnknownIdentifier, e.line, e.col,
                                              "unknown identifier '" + e.name + "'"}};
                return set(e, it->second);
            }
            case ExprKind::Unary: {
                Type t = check(mut(e.lhs));
                if (e.un_op == UnaryOp::Neg) {
                    require(e, t == Type::Int, "operand of '-' must be int");
                    return set(e, Type::Int);
                }
                require(e, t == Type::Bool, "operand of '!' must be bool");
                return set(e, Type::Bool);
            }
            case ExprKind::SeqLen: {
                Type t = check(mut(e.lhs));
                require(e, t == Type::IntSeq, "operand of |...| must be seq<int>");
                return set(e, Type::Int);
            }
            case ExprKind::SeqIndex: {
                Type ts = check(mut(e.lhs));
                Type ti = check(mut(e.rhs));
                require(e, ts == Type::IntSeq, "indexed value must be seq<int>");
                require(e, ti == Type::Int, "sequence index must be int");
                return set(e, Type::Int);
            }
            case ExprKind::Quantified: {
                if (scope_.count(e.name))
                    throw TypeFail{ParseError{
                        ErrorCategory::TypeMismatch, e.line, e.col,
                        "quantified variable '" + e.name + "' shadows an existing name"}};
                scope_[e.name] = Type::Int;
                Type tb = check(mut(e.lhs));
                scope_.erase(e.name);
                require(e, tb == Type::Bool, "quantifier body must be bool");
                return set(e, Type::Bool);
            }
            case ExprKind::Binary: {
                Type tl = check(mut(e.lhs));
                Type tr = check(mut(e.rhs));
                switch (e.bin_op) {
                    case BinaryOp::Add:
                    case BinaryOp::Sub:
                    case BinaryOp::Mul:
                    case BinaryOp::Div:
                    case BinaryOp::Mod:
                        require(e, tl == Type::Int && tr == Type::Int,
                                "arithmetic operands must be int");
                        return set(e, Type::Int);
                    case BinaryOp::Lt:
                    case BinaryOp::Le:
                    case BinaryOp::Gt:
                    case BinaryOp::Ge:
                        require(e, tl == Type::Int && tr == Type::Int,
                                "ordering comparison operands must be int");
                        return set(e, Type::Bool);
                    case BinaryOp::Eq:
                    case BinaryOp::Ne:
                        require(e, tl == tr, "equality operands must have the same type");
                        return set(e, Type::Bool);
                    case BinaryOp::And:
                    case BinaryOp::Or:
                    case BinaryOp::Implies:
                    case BinaryOp::Iff:
                        require(e, tl == Type::Bool && tr == Type::Bool,
                                "logical operands must be bool");
                        return set(e, Type::Bool);
                }
                return set(e, Type::Bool);
            }
        }
        return Type::Bool;
    }

    void check_formula(Expr& e) {
        Type t = check(e);
        if (t != Type::Bool)
            throw TypeFail{ParseError{ErrorCategory::TypeMismatch, e.line, e.col,
                                      std::string("formula must be bool, found ") + type_name(t)}};
    }

   private:
    static Expr& mut(const ExprPtr& p) { return const_cast<Expr&>(*p); }

    static Type set(Expr& e, Type t) {
        e.type = t;
        return t;
    }

    static void require(const Expr& e, bool ok, const std::string& msg) {
        if (!ok) throw TypeFail{ParseError{ErrorCategory::TypeMismatch, e.line, e.col, msg}};
    }

    std::map<std::string, Type, std::less<>> scope_;
};

template <typename Fn>
auto guarded(Fn&& fn) -> std::variant<decltype(fn()), ParseError> {
    try {
        return fn();
    } catch (const LexFail& f) {
        return f.err;
    } catch (const ParseFail& f) {
        return f.err;
    } catch (const TypeFail& f) {
        return f.err;
    }
}

}  // namespace

SignatureParseResult parse_signature(std::string_view text) {
    auto r = guarded([&] {
        Parser p(Lexer(text).run());
        Signature sig = p.parse_signature_body();
        sig.surface = std::string(text);
        return sig;
    });
    if (auto* e = std::get_if<ParseError>(&r)) return *e;
    return std::get<Signature>(r);
}

SpecParseResult parse_spec(std::string_view text, const Signature& sig) {
    return guarded([&] {
        Parser p(Lexer(text).run());
        SpecPair sp = p.parse_spec_body();
        for (auto& f : sp.preconditions) {
            TypeChecker tc(sig, /*allow_returns=*/false);
            tc.check_formula(const_cast<Expr&>(*f));
        }
        for (auto& f : sp.postconditions) {
            TypeChecker tc(sig, /*allow_returns=*/true);
            tc.check_formula(const_cast<Expr&>(*f));
        }
        return sp;
    });
}

ExprParseResult parse_expression(std::string_view text, const Signature& sig,
                                 bool allow_returns) {
    auto r = guarded([&]() -> ExprPtr {
        Parser p(Lexer(text).run());
        auto e = p.parse_single_expr();
        TypeChecker tc(sig, allow_returns);
        tc.check_formula(*e);
        return e;
    });
    if (auto* e = std::get_if<ParseError>(&r)) return *e;
    return std::get<ExprPtr>(r);
}

// ---------------------------------------------------------------------------
// Pretty printer
// ---------------------------------------------------------------------------

namespace {

int precedence(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Binary:
            switch (e.bin_op) {
                case BinaryOp::Iff: return 1;
                case BinaryOp::Implies: return 2;
                case BinaryOp::Or: return 3;
                case BinaryOp::And: return 4;
                case BinaryOp::Eq:
                case BinaryOp::Ne:
                case BinaryOp::Lt:
                case BinaryOp::Le:
                case BinaryOp::Gt:
                case BinaryOp::Ge: return 6;
                case BinaryOp::Add:
                case BinaryOp::Sub: return 7;
                case BinaryOp::Mul:
                case BinaryOp::Div:
                case BinaryOp::Mod: return 8;
            }
            return 0;
        case ExprKind::Unary: return e.un_op == UnaryOp::Not ? 5 : 9;
        case ExprKind::Quantified: return 0;  // body swallows everything; always parenthesize
        default: return 11;
    }
}

const char* op_text(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Mod: return "%";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::And: return "&&";
        case BinaryOp::Or: return "||";
        case BinaryOp::Implies: return "==>";
        case BinaryOp::Iff: return "<==>";
    }
    return "?";
}

void print(std::ostream& os, const Expr& e, int min_prec);

void print_child(std::ostream& os, const Expr& child, int required) {
    if (precedence(child) < required) {
        os << '(';
        print(os, child, 0);
        os << ')';
    } else {
        print(os, child, 0);
    }
}

void print(std::ostream& os, const Expr& e, int) {
    switch (e.kind) {
        case ExprKind::IntLit: os << e.int_value; return;
        case ExprKind::BoolLit: os << (e.bool_value ? "true" : "false"); return;
        case ExprKind::Var: os << e.name; return;
        case ExprKind::SeqLen:
            os << '|';
            print(os, *e.lhs, 0);
            os << '|';
            return;
        case ExprKind::SeqIndex:
            print_child(os, *e.lhs, 10);
            os << '[';
            print(os, *e.rhs, 0);
            os << ']';
            return;
        case ExprKind::Unary: {
            int p = precedence(e);
            os << (e.un_op == UnaryOp::Not ? "!" : "-");
            print_child(os, *e.lhs, p);
            return;
        }
        case ExprKind::Quantified:
            os << (e.quant == Quantifier::Forall ? "forall " : "exists ") << e.name << " :: ";
            print(os, *e.lhs, 0);
            return;
        case ExprKind::Binary: {
            int p = precedence(e);
            bool right_assoc = e.bin_op == BinaryOp::Implies;
            // left-assoc chains keep the left child at the same level
            print_child(os, *e.lhs, right_assoc ? p + 1 : p);
            os << ' ' << op_text(e.bin_op) << ' ';
            print_child(os, *e.rhs, right_assoc ? p : p + 1);
            return;
        }
    }
}

}  // namespace

std::string to_string(const ExprPtr& e) {
    std::ostringstream os;
    print(os, *e, 0);
    return os.str();
}

std::string to_string(const SpecPair& s) {
    std::ostringstream os;
    bool first = true;
    for (const auto& f : s.preconditions) {
        if (!first) os << '\n';
        os << "requires " << to_string(f) << ";";
        first = false;
    }
    for (const auto& f : s.postconditions) {
        if (!first) os << '\n';
        os << "ensures " << to_string(f) << ";";
        first = false;
    }
    return os.str();
}

std::string to_string(const Signature& sig) {
    std::ostringstream os;
    os << "method " << sig.method_name << "(";
    for (size_t i = 0; i < sig.params.size(); ++i) {
        if (i) os << ", ";
        os << sig.params[i].name << ": " << type_name(sig.params[i].type);
    }
    os << ")";
    if (!sig.returns.empty()) {
        os << " returns (";
        for (size_t i = 0; i < sig.returns.size(); ++i) {
            if (i) os << ", ";
            os << sig.returns[i].name << ": " << type_name(sig.returns[i].type);
        }
        os << ")";
    }
    return os.str();
}

}  // namespace tmprob::spec
