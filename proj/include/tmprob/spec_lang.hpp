#pragma once

// Dafny-like pre/post-condition mini-language: surface grammar, typed AST,
// bounded evaluation, implication/equivalence decisions over finite domains,
// formalization-mistake diagnosis, and SMT-LIB 2 export.
//
// Surface grammar:
//   spec      := { "requires" expr ";" } { "ensures" expr ";" }
//   signature := "method" name "(" params ")" [ "returns" "(" params ")" ]
//
// Expression precedence, loosest first:
//   <==>  ==>  ||  &&  !  comparisons  additive  multiplicative
// plus quantifiers ("forall x :: e", "exists x :: e", body extends maximally
// to the right), sequence length |a| and indexing a[i]. Comparisons chain
// Dafny-style: "0 <= j < r" means "0 <= j && j < r".

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tmprob::spec {

enum class Type { Int, Bool, IntSeq };

const char* type_name(Type t);

struct Param {
    std::string name;
    Type type = Type::Int;
};

struct Signature {
    std::string method_name;
    std::vector<Param> params;
    std::vector<Param> returns;
    std::string surface;  // original text when parsed from a surface form

    std::vector<Param> all_vars() const;
    const Param* find(std::string_view name) const;
};

enum class ErrorCategory { Lexical, Syntax, UnknownIdentifier, TypeMismatch };

const char* error_category_name(ErrorCategory c);

struct ParseError {
    ErrorCategory category = ErrorCategory::Syntax;
    int line = 1;
    int col = 1;
    std::string message;

    // "line L, col C: <category>: <message>" — reused verbatim as corrective
    // feedback by the TM runtime.
    std::string render() const;
};

enum class ExprKind { IntLit, BoolLit, Var, Unary, Binary, SeqLen, SeqIndex, Quantified };
enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Implies, Iff };
enum class Quantifier { Forall, Exists };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind = ExprKind::BoolLit;
    long long int_value = 0;   // IntLit
    bool bool_value = false;   // BoolLit
    std::string name;          // Var; Quantified bound variable
    UnaryOp un_op = UnaryOp::Not;
    BinaryOp bin_op = BinaryOp::And;
    Quantifier quant = Quantifier::Forall;
    ExprPtr lhs;               // Unary/SeqLen operand; Quantified body; Binary/SeqIndex left
    ExprPtr rhs;               // Binary right; SeqIndex index
    Type type = Type::Bool;    // filled in by the typechecker
    int line = 1;
    int col = 1;
};

// Formulas conjoin; an empty list means "true". Preconditions reference only
// params; postconditions may also reference returns.
struct SpecPair {
    std::vector<ExprPtr> preconditions;
    std::vector<ExprPtr> postconditions;
};

using SignatureParseResult = std::variant<Signature, ParseError>;
using SpecParseResult = std::variant<SpecPair, ParseError>;
using ExprParseResult = std::variant<ExprPtr, ParseError>;

SignatureParseResult parse_signature(std::string_view text);
SpecParseResult parse_spec(std::string_view text, const Signature& sig);
// One boolean expression, typechecked against params (+ returns when
// allow_returns). Used for dataset groundtruth clauses and ad-hoc queries.
ExprParseResult parse_expression(std::string_view text, const Signature& sig,
                                 bool allow_returns = true);

std::string to_string(const ExprPtr& e);
std::string to_string(const SpecPair& s);
std::string to_string(const Signature& sig);

// Finite evaluation domain: ints in [-int_bound, int_bound], sequences of
// length 0..max_seq_len over the same ints, quantified variables ranging over
// [quantifier_lo, quantifier_hi].
struct EvaluationBounds {
    long long int_bound = 2;
    long long max_seq_len = 2;
    long long quantifier_lo = -3;
    long long quantifier_hi = 4;

    static EvaluationBounds from(long long int_bound, long long max_seq_len);
    void validate() const;  // throws std::invalid_argument
    bool operator==(const EvaluationBounds&) const = default;
};

using Value = std::variant<long long, bool, std::vector<long long>>;
using Env = std::map<std::string, Value>;

enum class EvalErrorKind { DivisionByZero, IndexOutOfRange };

const char* eval_error_kind_name(EvalErrorKind k);

struct EvalError {
    EvalErrorKind kind = EvalErrorKind::DivisionByZero;
    int line = 1;
    int col = 1;
};

struct EvalResult {
    bool ok = false;
    Value value;
    EvalError error;

    bool truth() const { return std::get<bool>(value); }
};

EvalResult evaluate(const ExprPtr& f, const Env& env, const EvaluationBounds& bounds);

// Deterministic enumeration of all environments for `vars` within `bounds`:
// params in declaration order, ints ascending, bools false-then-true,
// sequences by length then lexicographically.
class EnvSpace {
   public:
    EnvSpace(std::vector<Param> vars, const EvaluationBounds& bounds);
    std::uint64_t size() const { return total_; }
    Env at(std::uint64_t index) const;

   private:
    std::vector<Param> vars_;
    EvaluationBounds bounds_;
    std::vector<std::uint64_t> var_sizes_;
    std::uint64_t total_ = 1;
};

// Bounded implication over all environments of the signature's params and
// returns. Environments where exactly one side errors falsify; environments
// where both sides error with the same kind are skipped.
bool implies_bounded(const ExprPtr& f, const ExprPtr& g, const Signature& sig,
                     const EvaluationBounds& bounds);

// pre1 <=> pre2 over param environments, and post1 <=> post2 over all
// param+return environments satisfying pre1. Complete over the bounded
// domain; falsification-only beyond it.
bool equivalent_bounded(const SpecPair& s1, const SpecPair& s2, const Signature& sig,
                        const EvaluationBounds& bounds);

enum class MistakeLabel {
    Equivalent,
    SyntaxError,
    WeakPre,
    StrongPre,
    IncorrectPre,
    WeakPost,
    StrongPost,
    IncorrectPost,
};

const char* mistake_label_name(MistakeLabel m);

struct Diagnosis {
    MistakeLabel primary = MistakeLabel::Equivalent;
    std::vector<MistakeLabel> labels;  // full label set, primary included
};

// Classify how a candidate spec deviates from the groundtruth. Primary label
// priority: SyntaxError over pre-condition labels over post-condition labels
// over Equivalent. Pre labels compare the conjoined preconditions; post
// labels compare the conjoined postconditions under the groundtruth
// precondition.
Diagnosis diagnose(const SpecParseResult& candidate, const SpecPair& groundtruth,
                   const Signature& sig, const EvaluationBounds& bounds);

// SMT-LIB 2 script asserting the negation of the pre/post equivalence query
// between two specs, so `unsat` means equivalent. Sequences are encoded as an
// uninterpreted length constant plus an element function.
std::string to_smtlib(const SpecPair& s1, const SpecPair& s2, const Signature& sig);

}  // namespace tmprob::spec
