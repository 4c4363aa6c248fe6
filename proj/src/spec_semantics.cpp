#include "tmprob/spec_lang.hpp"

#include <cassert>
#include <cstdlib>
#include <stdexcept>

namespace tmprob::spec {

const char* eval_error_kind_name(EvalErrorKind k) {
    switch (k) {
        case EvalErrorKind::DivisionByZero: return "division by zero";
        case EvalErrorKind::IndexOutOfRange: return "index out of range";
    }
    return "?";
}

EvaluationBounds EvaluationBounds::from(long long int_bound, long long max_seq_len) {
    EvaluationBounds b;
    b.int_bound = int_bound;
    b.max_seq_len = max_seq_len;
    b.quantifier_lo = -int_bound - 1;
    b.quantifier_hi = int_bound + max_seq_len;
    b.validate();
    return b;
}

void EvaluationBounds::validate() const {
    if (int_bound < 0 || max_seq_len < 0)
        throw std::invalid_argument("evaluation bounds must be nonnegative");
    if (quantifier_lo > 0 || quantifier_hi < max_seq_len)
        throw std::invalid_argument("quantifier range must cover [0, max_seq_len]");
}

namespace {

struct Res {
    bool ok;
    Value value;
    EvalError error;

    static Res of(Value v) { return Res{true, std::move(v), {}}; }
    static Res err(EvalErrorKind k, const Expr& at) {
        return Res{false, false, EvalError{k, at.line, at.col}};
    }
    bool truth() const { return std::get<bool>(value); }
    long long num() const { return std::get<long long>(value); }
};

// Euclidean division: remainder is always in [0, |b|).
long long euclid_div(long long a, long long b) {
    long long q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    long long r = a - q * b;
    if (r < 0) {
        q += (b > 0) ? -1 : 1;
    }
    (void)r;
    return q;
}

long long euclid_mod(long long a, long long b) {
    long long r = a % b;
    if (r < 0) r += (b > 0) ? b : -b;
    return r;
}

Res eval(const Expr& e, Env& env, const EvaluationBounds& bounds) {
    switch (e.kind) {
        case ExprKind::IntLit: return Res::of(e.int_value);
        case ExprKind::BoolLit: return Res::of(e.bool_value);
        case ExprKind::Var: {
            auto it = env.find(e.name);
            assert(it != env.end() && "typechecked formula evaluated in incomplete env");
            return Res::of(it->second);
        }
        case ExprKind::Unary: {
            Res v = eval(*e.lhs, env, bounds);
            if (!v.ok) return v;
            if (e.un_op == UnaryOp::Neg) return Res::of(-v.num());
            return Res::of(!v.truth());
        }
        case ExprKind::SeqLen: {
            Res v = eval(*e.lhs, env, bounds);
            if (!v.ok) return v;
            return Res::of(
                static_cast<long long>(std::get<std::vector<long long>>(v.value).size()));
        }
        case ExprKind::SeqIndex: {
            Res s = eval(*e.lhs, env, bounds);
            if (!s.ok) return s;
            Res i = eval(*e.rhs, env, bounds);
            if (!i.ok) return i;
            const auto& vec = std::get<std::vector<long long>>(s.value);
            long long idx = i.num();
            if (idx < 0 || idx >= static_cast<long long>(vec.size()))
                return Res::err(EvalErrorKind::IndexOutOfRange, e);
            return Res::of(vec[static_cast<size_t>(idx)]);
        }
        case ExprKind::Quantified: {
            for (long long v = bounds.quantifier_lo; v <= bounds.quantifier_hi; ++v) {
                env[e.name] = v;
                Res body = eval(*e.lhs, env, bounds);
                if (!body.ok) {
                    env.erase(e.name);
                    return body;
                }
                if (e.quant == Quantifier::Forall && !body.truth()) {
                    env.erase(e.name);
                    return Res::of(false);
                }
                if (e.quant == Quantifier::Exists && body.truth()) {
                    env.erase(e.name);
                    return Res::of(true);
                }
            }
            env.erase(e.name);
            return Res::of(e.quant == Quantifier::Forall);
        }
        case ExprKind::Binary: {
            // short-circuit forms first: the left operand decides before the
            // right is evaluated
            if (e.bin_op == BinaryOp::And || e.bin_op == BinaryOp::Or ||
                e.bin_op == BinaryOp::Implies) {
                Res l = eval(*e.lhs, env, bounds);
                if (!l.ok) return l;
                bool lv = l.truth();
                if (e.bin_op == BinaryOp::And && !lv) return Res::of(false);
                if (e.bin_op == BinaryOp::Or && lv) return Res::of(true);
                if (e.bin_op == BinaryOp::Implies && !lv) return Res::of(true);
                Res r = eval(*e.rhs, env, bounds);
                if (!r.ok) return r;
                return Res::of(r.truth());
            }
            Res l = eval(*e.lhs, env, bounds);
            if (!l.ok) return l;
            Res r = eval(*e.rhs, env, bounds);
            if (!r.ok) return r;
            switch (e.bin_op) {
                case BinaryOp::Add: return Res::of(l.num() + r.num());
                case BinaryOp::Sub: return Res::of(l.num() - r.num());
                case BinaryOp::Mul: return Res::of(l.num() * r.num());
                case BinaryOp::Div:
                    if (r.num() == 0) return Res::err(EvalErrorKind::DivisionByZero, e);
                    return Res::of(euclid_div(l.num(), r.num()));
                case BinaryOp::Mod:
                    if (r.num() == 0) return Res::err(EvalErrorKind::DivisionByZero, e);
                    return Res::of(euclid_mod(l.num(), r.num()));
                case BinaryOp::Eq: return Res::of(l.value == r.value);
                case BinaryOp::Ne: return Res::of(!(l.value == r.value));
                case BinaryOp::Lt: return Res::of(l.num() < r.num());
                case BinaryOp::Le: return Res::of(l.num() <= r.num());
                case BinaryOp::Gt: return Res::of(l.num() > r.num());
                case BinaryOp::Ge: return Res::of(l.num() >= r.num());
                case BinaryOp::Iff: return Res::of(l.truth() == r.truth());
                default: break;
            }
            return Res::of(false);
        }
    }
    return Res::of(false);
}

}  // namespace

EvalResult evaluate(const ExprPtr& f, const Env& env, const EvaluationBounds& bounds) {
    Env scratch = env;
    Res r = eval(*f, scratch, bounds);
    EvalResult out;
    out.ok = r.ok;
    out.value = r.value;
    out.error = r.error;
    return out;
}

// ---------------------------------------------------------------------------
// Environment enumeration
// ---------------------------------------------------------------------------

namespace {

std::uint64_t int_domain_size(const EvaluationBounds& b) {
    return static_cast<std::uint64_t>(2 * b.int_bound + 1);
}

std::uint64_t seq_domain_size(const EvaluationBounds& b) {
    std::uint64_t n = int_domain_size(b);
    std::uint64_t total = 0, per_len = 1;
    for (long long len = 0; len <= b.max_seq_len; ++len) {
        total += per_len;
        per_len *= n;
    }
    return total;
}

Value value_at(Type t, std::uint64_t index, const EvaluationBounds& b) {
    switch (t) {
        case Type::Int:
            return static_cast<long long>(index) - b.int_bound;
        case Type::Bool:
            return index == 1;
        case Type::IntSeq: {
            std::uint64_t n = int_domain_size(b);
            long long len = 0;
            std::uint64_t per_len = 1;
            while (index >= per_len) {
                index -= per_len;
                per_len *= n;
                ++len;
            }
            std::vector<long long> vec(static_cast<size_t>(len));
            for (long long i = len - 1; i >= 0; --i) {
                vec[static_cast<size_t>(i)] =
                    static_cast<long long>(index % n) - b.int_bound;
                index /= n;
            }
            return vec;
        }
    }
    return 0LL;
}

constexpr std::uint64_t kMaxEnvCount = 20'000'000;

}  // namespace

EnvSpace::EnvSpace(std::vector<Param> vars, const EvaluationBounds& bounds)
    : vars_(std::move(vars)), bounds_(bounds) {
    bounds_.validate();
    for (const auto& v : vars_) {
        std::uint64_t n = 1;
        switch (v.type) {
            case Type::Int: n = int_domain_size(bounds_); break;
            case Type::Bool: n = 2; break;
            case Type::IntSeq: n = seq_domain_size(bounds_); break;
        }
        var_sizes_.push_back(n);
        if (total_ > kMaxEnvCount / n)
            throw std::invalid_argument(
                "evaluation bounds enumerate too many environments; lower --int-bound or "
                "--len-bound");
        total_ *= n;
    }
}

Env EnvSpace::at(std::uint64_t index) const {
    Env env;
    for (size_t i = vars_.size(); i-- > 0;) {
        std::uint64_t n = var_sizes_[i];
        env[vars_[i].name] = value_at(vars_[i].type, index % n, bounds_);
        index /= n;
    }
    return env;
}

// ---------------------------------------------------------------------------
// Bounded implication and equivalence
// ---------------------------------------------------------------------------

namespace {

ExprPtr conjoin(const std::vector<ExprPtr>& fs) {
    if (fs.empty()) {
        auto t = std::make_shared<Expr>();
        t->kind = ExprKind::BoolLit;
        t->bool_value = true;
        t->type = Type::Bool;
        return t;
    }
    ExprPtr acc = fs[0];
    for (size_t i = 1; i < fs.size(); ++i) {
        auto n = std::make_shared<Expr>();
        n->kind = ExprKind::Binary;
        n->bin_op = BinaryOp::And;
        n->lhs = acc;
        n->rhs = fs[i];
        n->type = Type::Bool;
        acc = n;
    }
    return acc;
}

struct SideResult {
    bool ok;
    bool value;
    EvalErrorKind err;
};

SideResult eval_side(const ExprPtr& f, Env& env, const EvaluationBounds& b) {
    Res r = eval(*f, env, b);
    if (r.ok) return {true, r.truth(), {}};
    return {false, false, r.error.kind};
}

enum class PairCmp { BothTrue, BothFalse, LeftOnly, RightOnly, Skip, Disagree };

// Shared error convention: one-sided errors count as disagreement; identical
// error kinds on both sides skip the environment.
PairCmp compare_pair(const ExprPtr& f, const ExprPtr& g, Env& env, const EvaluationBounds& b) {
    SideResult lf = eval_side(f, env, b);
    SideResult lg = eval_side(g, env, b);
    if (!lf.ok && !lg.ok) return lf.err == lg.err ? PairCmp::Skip : PairCmp::Disagree;
    if (!lf.ok || !lg.ok) return PairCmp::Disagree;
    if (lf.value && lg.value) return PairCmp::BothTrue;
    if (!lf.value && !lg.value) return PairCmp::BothFalse;
    return lf.value ? PairCmp::LeftOnly : PairCmp::RightOnly;
}

// f => g over every env in `space` where `guard` (if given) evaluates true.
// Guard environments that error or evaluate false are skipped.
bool implies_over(const ExprPtr& guard, const ExprPtr& f, const ExprPtr& g,
                  const EnvSpace& space, const EvaluationBounds& b) {
    for (std::uint64_t i = 0; i < space.size(); ++i) {
        Env env = space.at(i);
        if (guard) {
            SideResult gv = eval_side(guard, env, b);
            if (!gv.ok || !gv.value) continue;
        }
        switch (compare_pair(f, g, env, b)) {
            case PairCmp::LeftOnly:
            case PairCmp::Disagree: return false;
            default: break;
        }
    }
    return true;
}

// f <=> g over every env in `space` where `guard` (if given) evaluates true.
bool iff_over(const ExprPtr& guard, const ExprPtr& f, const ExprPtr& g, const EnvSpace& space,
              const EvaluationBounds& b) {
    for (std::uint64_t i = 0; i < space.size(); ++i) {
        Env env = space.at(i);
        if (guard) {
            SideResult gv = eval_side(guard, env, b);
            if (!gv.ok || !gv.value) continue;
        }
        switch (compare_pair(f, g, env, b)) {
            case PairCmp::LeftOnly:
            case PairCmp::RightOnly:
            case PairCmp::Disagree: return false;
            default: break;
        }
    }
    return true;
}

}  // namespace

bool implies_bounded(const ExprPtr& f, const ExprPtr& g, const Signature& sig,
                     const EvaluationBounds& bounds) {
    EnvSpace space(sig.all_vars(), bounds);
    return implies_over(nullptr, f, g, space, bounds);
}

bool equivalent_bounded(const SpecPair& s1, const SpecPair& s2, const Signature& sig,
                        const EvaluationBounds& bounds) {
    ExprPtr pre1 = conjoin(s1.preconditions);
    ExprPtr pre2 = conjoin(s2.preconditions);
    EnvSpace param_space(sig.params, bounds);
    if (!iff_over(nullptr, pre1, pre2, param_space, bounds)) return false;

    ExprPtr post1 = conjoin(s1.postconditions);
    ExprPtr post2 = conjoin(s2.postconditions);
    EnvSpace full_space(sig.all_vars(), bounds);
    return iff_over(pre1, post1, post2, full_space, bounds);
}

// ---------------------------------------------------------------------------
// Mistake diagnosis
// ---------------------------------------------------------------------------

const char* mistake_label_name(MistakeLabel m) {
    switch (m) {
        case MistakeLabel::Equivalent: return "Equivalent";
        case MistakeLabel::SyntaxError: return "SyntaxError";
        case MistakeLabel::WeakPre: return "WeakPre";
        case MistakeLabel::StrongPre: return "StrongPre";
        case MistakeLabel::IncorrectPre: return "IncorrectPre";
        case MistakeLabel::WeakPost: return "WeakPost";
        case MistakeLabel::StrongPost: return "StrongPost";
        case MistakeLabel::IncorrectPost: return "IncorrectPost";
    }
    return "?";
}

Diagnosis diagnose(const SpecParseResult& candidate, const SpecPair& groundtruth,
                   const Signature& sig, const EvaluationBounds& bounds) {
    if (std::holds_alternative<ParseError>(candidate))
        return Diagnosis{MistakeLabel::SyntaxError, {MistakeLabel::SyntaxError}};
    const SpecPair& cand = std::get<SpecPair>(candidate);

    ExprPtr gt_pre = conjoin(groundtruth.preconditions);
    ExprPtr cd_pre = conjoin(cand.preconditions);
    EnvSpace param_space(sig.params, bounds);
    bool pre_fwd = implies_over(nullptr, cd_pre, gt_pre, param_space, bounds);
    bool pre_bwd = implies_over(nullptr, gt_pre, cd_pre, param_space, bounds);

    ExprPtr gt_post = conjoin(groundtruth.postconditions);
    ExprPtr cd_post = conjoin(cand.postconditions);
    EnvSpace full_space(sig.all_vars(), bounds);
    // Post-condition comparison is relative to the groundtruth precondition:
    // the candidate is weak when everything the groundtruth promises already
    // implies it, and strong when it implies the groundtruth promise.
    bool post_fwd = implies_over(gt_pre, gt_post, cd_post, full_space, bounds);
    bool post_bwd = implies_over(gt_pre, cd_post, gt_post, full_space, bounds);

    Diagnosis d;
    if (!(pre_fwd && pre_bwd)) {
        if (pre_fwd)
            d.labels.push_back(MistakeLabel::StrongPre);
        else if (pre_bwd)
            d.labels.push_back(MistakeLabel::WeakPre);
        else
            d.labels.push_back(MistakeLabel::IncorrectPre);
    }
    if (!(post_fwd && post_bwd)) {
        if (post_fwd)
            d.labels.push_back(MistakeLabel::WeakPost);
        else if (post_bwd)
            d.labels.push_back(MistakeLabel::StrongPost);
        else
            d.labels.push_back(MistakeLabel::IncorrectPost);
    }
    if (d.labels.empty()) d.labels.push_back(MistakeLabel::Equivalent);
    d.primary = d.labels.front();
    return d;
}

}  // namespace tmprob::spec
