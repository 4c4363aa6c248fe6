#include "tmprob/spec_lang.hpp"

#include <sstream>
#include <stdexcept>

namespace tmprob::spec {

namespace {

// Sequence variables are encoded as <name>_len : Int plus an uninterpreted
// element function <name>_elem : Int -> Int. Index bounds are not asserted;
// the export reflects the idealized total semantics over unbounded integers.

void emit(std::ostream& os, const Expr& e);

void emit_args(std::ostream& os, const char* op, const Expr& l, const Expr& r) {
    os << '(' << op << ' ';
    emit(os, l);
    os << ' ';
    emit(os, r);
    os << ')';
}

void emit_seq_eq(std::ostream& os, const Expr& l, const Expr& r) {
    if (l.kind != ExprKind::Var || r.kind != ExprKind::Var)
        throw std::logic_error("sequence-typed expression is not a variable");
    const std::string& a = l.name;
    const std::string& b = r.name;
    os << "(and (= " << a << "_len " << b << "_len) (forall ((_i Int)) (=> (and (<= 0 _i) (< _i "
       << a << "_len)) (= (" << a << "_elem _i) (" << b << "_elem _i)))))";
}

void emit(std::ostream& os, const Expr& e) {
    switch (e.kind) {
        case ExprKind::IntLit:
            if (e.int_value < 0)
                os << "(- " << -e.int_value << ')';
            else
                os << e.int_value;
            return;
        case ExprKind::BoolLit:
            os << (e.bool_value ? "true" : "false");
            return;
        case ExprKind::Var:
            os << e.name;
            return;
        case ExprKind::Unary:
            os << (e.un_op == UnaryOp::Neg ? "(- " : "(not ");
            emit(os, *e.lhs);
            os << ')';
            return;
        case ExprKind::SeqLen:
            if (e.lhs->kind != ExprKind::Var)
                throw std::logic_error("sequence-typed expression is not a variable");
            os << e.lhs->name << "_len";
            return;
        case ExprKind::SeqIndex:
            if (e.lhs->kind != ExprKind::Var)
                throw std::logic_error("sequence-typed expression is not a variable");
            os << '(' << e.lhs->name << "_elem ";
            emit(os, *e.rhs);
            os << ')';
            return;
        case ExprKind::Quantified:
            os << '(' << (e.quant == Quantifier::Forall ? "forall" : "exists") << " ((" << e.name
               << " Int)) ";
            emit(os, *e.lhs);
            os << ')';
            return;
        case ExprKind::Binary:
            switch (e.bin_op) {
                case BinaryOp::Add: emit_args(os, "+", *e.lhs, *e.rhs); return;
                case BinaryOp::Sub: emit_args(os, "-", *e.lhs, *e.rhs); return;
                case BinaryOp::Mul: emit_args(os, "*", *e.lhs, *e.rhs); return;
                case BinaryOp::Div: emit_args(os, "div", *e.lhs, *e.rhs); return;
                case BinaryOp::Mod: emit_args(os, "mod", *e.lhs, *e.rhs); return;
                case BinaryOp::Eq:
                    if (e.lhs->type == Type::IntSeq) {
                        emit_seq_eq(os, *e.lhs, *e.rhs);
                        return;
                    }
                    emit_args(os, "=", *e.lhs, *e.rhs);
                    return;
                case BinaryOp::Ne:
                    os << "(not ";
                    if (e.lhs->type == Type::IntSeq)
                        emit_seq_eq(os, *e.lhs, *e.rhs);
                    else
                        emit_args(os, "=", *e.lhs, *e.rhs);
                    os << ')';
                    return;
                case BinaryOp::Lt: emit_args(os, "<", *e.lhs, *e.rhs); return;
                case BinaryOp::Le: emit_args(os, "<=", *e.lhs, *e.rhs); return;
                case BinaryOp::Gt: emit_args(os, ">", *e.lhs, *e.rhs); return;
                case BinaryOp::Ge: emit_args(os, ">=", *e.lhs, *e.rhs); return;
                case BinaryOp::And: emit_args(os, "and", *e.lhs, *e.rhs); return;
                case BinaryOp::Or: emit_args(os, "or", *e.lhs, *e.rhs); return;
                case BinaryOp::Implies: emit_args(os, "=>", *e.lhs, *e.rhs); return;
                case BinaryOp::Iff: emit_args(os, "=", *e.lhs, *e.rhs); return;
            }
            return;
    }
}

void emit_conjunction(std::ostream& os, const std::vector<ExprPtr>& fs) {
    if (fs.empty()) {
        os << "true";
        return;
    }
    if (fs.size() == 1) {
        emit(os, *fs[0]);
        return;
    }
    os << "(and";
    for (const auto& f : fs) {
        os << ' ';
        emit(os, *f);
    }
    os << ')';
}

void emit_declarations(std::ostream& os, const Signature& sig) {
    for (const auto& v : sig.all_vars()) {
        switch (v.type) {
            case Type::Int:
                os << "(declare-const " << v.name << " Int)\n";
                break;
            case Type::Bool:
                os << "(declare-const " << v.name << " Bool)\n";
                break;
            case Type::IntSeq:
                os << "(declare-const " << v.name << "_len Int)\n";
                os << "(declare-fun " << v.name << "_elem (Int) Int)\n";
                os << "(assert (>= " << v.name << "_len 0))\n";
                break;
        }
    }
}

}  // namespace

std::string to_smtlib(const SpecPair& s1, const SpecPair& s2, const Signature& sig) {
    std::ostringstream os;
    os << "; pre/post equivalence query for " << sig.method_name << "\n";
    os << "; unsat means the two specifications are equivalent\n";
    os << "(set-logic ALL)\n";
    emit_declarations(os, sig);
    os << "(assert (not (and (= ";
    emit_conjunction(os, s1.preconditions);
    os << ' ';
    emit_conjunction(os, s2.preconditions);
    os << ") (=> ";
    emit_conjunction(os, s1.preconditions);
    os << " (= ";
    emit_conjunction(os, s1.postconditions);
    os << ' ';
    emit_conjunction(os, s2.postconditions);
    os << ")))))\n";
    os << "(check-sat)\n";
    return os.str();
}

}  // namespace tmprob::spec
