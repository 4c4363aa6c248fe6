#pragma once

// Seeded random generators for typed formulas, spec pairs, and environments.
// Generated ASTs carry correct type annotations by construction.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "tmprob/spec_lang.hpp"

namespace formula_gen {

namespace sl = tmprob::spec;

inline std::shared_ptr<sl::Expr> raw(sl::ExprKind k, sl::Type t) {
    auto e = std::make_shared<sl::Expr>();
    e->kind = k;
    e->type = t;
    return e;
}

inline sl::ExprPtr int_lit(long long v) {
    auto e = raw(sl::ExprKind::IntLit, sl::Type::Int);
    e->int_value = v;
    return e;
}

inline sl::ExprPtr bool_lit(bool v) {
    auto e = raw(sl::ExprKind::BoolLit, sl::Type::Bool);
    e->bool_value = v;
    return e;
}

inline sl::ExprPtr var(const std::string& name, sl::Type t) {
    auto e = raw(sl::ExprKind::Var, t);
    e->name = name;
    return e;
}

inline sl::ExprPtr unary(sl::UnaryOp op, sl::ExprPtr x) {
    auto e = raw(sl::ExprKind::Unary, op == sl::UnaryOp::Neg ? sl::Type::Int : sl::Type::Bool);
    e->un_op = op;
    e->lhs = std::move(x);
    return e;
}

inline sl::ExprPtr binary(sl::BinaryOp op, sl::ExprPtr l, sl::ExprPtr r) {
    sl::Type t = sl::Type::Bool;
    switch (op) {
        case sl::BinaryOp::Add:
        case sl::BinaryOp::Sub:
        case sl::BinaryOp::Mul:
        case sl::BinaryOp::Div:
        case sl::BinaryOp::Mod: t = sl::Type::Int; break;
        default: break;
    }
    auto e = raw(sl::ExprKind::Binary, t);
    e->bin_op = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
}

inline sl::ExprPtr seq_len(sl::ExprPtr s) {
    auto e = raw(sl::ExprKind::SeqLen, sl::Type::Int);
    e->lhs = std::move(s);
    return e;
}

inline sl::ExprPtr seq_index(sl::ExprPtr s, sl::ExprPtr i) {
    auto e = raw(sl::ExprKind::SeqIndex, sl::Type::Int);
    e->lhs = std::move(s);
    e->rhs = std::move(i);
    return e;
}

inline sl::ExprPtr quantified(sl::Quantifier q, const std::string& name, sl::ExprPtr body) {
    auto e = raw(sl::ExprKind::Quantified, sl::Type::Bool);
    e->quant = q;
    e->name = name;
    e->lhs = std::move(body);
    return e;
}

class Generator {
   public:
    Generator(std::uint64_t seed, sl::Signature sig, sl::EvaluationBounds bounds)
        : rng_(seed), sig_(std::move(sig)), bounds_(bounds) {
        for (const auto& p : sig_.all_vars()) {
            if (p.type == sl::Type::Int) int_vars_.push_back(p.name);
            if (p.type == sl::Type::Bool) bool_vars_.push_back(p.name);
            if (p.type == sl::Type::IntSeq) seq_vars_.push_back(p.name);
        }
    }

    // Restrict variable use to params (for generating preconditions).
    void restrict_to_params() {
        int_vars_.clear();
        bool_vars_.clear();
        seq_vars_.clear();
        for (const auto& p : sig_.params) {
            if (p.type == sl::Type::Int) int_vars_.push_back(p.name);
            if (p.type == sl::Type::Bool) bool_vars_.push_back(p.name);
            if (p.type == sl::Type::IntSeq) seq_vars_.push_back(p.name);
        }
    }

    sl::ExprPtr gen_formula(int depth) { return gen_bool(depth); }

    sl::SpecPair gen_spec_pair(int depth) {
        sl::SpecPair sp;
        auto saved_int = int_vars_;
        auto saved_bool = bool_vars_;
        auto saved_seq = seq_vars_;
        restrict_to_params();
        int npre = pick(0, 2);
        for (int i = 0; i < npre; ++i) sp.preconditions.push_back(gen_bool(depth - 1));
        int_vars_ = saved_int;
        bool_vars_ = saved_bool;
        seq_vars_ = saved_seq;
        int npost = pick(0, 2);
        for (int i = 0; i < npost; ++i) sp.postconditions.push_back(gen_bool(depth - 1));
        return sp;
    }

    sl::Env gen_env() {
        sl::Env env;
        for (const auto& p : sig_.all_vars()) {
            switch (p.type) {
                case sl::Type::Int: env[p.name] = (long long)pick(-(int)bounds_.int_bound,
                                                                  (int)bounds_.int_bound);
                    break;
                case sl::Type::Bool: env[p.name] = pick(0, 1) == 1; break;
                case sl::Type::IntSeq: {
                    std::vector<long long> s(pick(0, (int)bounds_.max_seq_len));
                    for (auto& x : s)
                        x = pick(-(int)bounds_.int_bound, (int)bounds_.int_bound);
                    env[p.name] = std::move(s);
                    break;
                }
            }
        }
        return env;
    }

    std::mt19937_64& rng() { return rng_; }

   private:
    int pick(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng_);
    }

    sl::ExprPtr gen_int(int depth) {
        int leaf_choices = 1 + (int_vars_.empty() ? 0 : 1);
        if (depth <= 0 || pick(0, 3) == 0) {
            int c = pick(0, leaf_choices - 1);
            if (c == 0 || int_vars_.empty()) return int_lit(pick(-3, 3));
            return var(int_vars_[pick(0, (int)int_vars_.size() - 1)], sl::Type::Int);
        }
        int c = pick(0, seq_vars_.empty() ? 5 : 7);
        switch (c) {
            case 0: return unary(sl::UnaryOp::Neg, gen_int(depth - 1));
            case 1: return binary(sl::BinaryOp::Add, gen_int(depth - 1), gen_int(depth - 1));
            case 2: return binary(sl::BinaryOp::Sub, gen_int(depth - 1), gen_int(depth - 1));
            case 3: return binary(sl::BinaryOp::Mul, gen_int(depth - 1), gen_int(depth - 1));
            case 4: return binary(sl::BinaryOp::Div, gen_int(depth - 1), gen_int(depth - 1));
            case 5: return binary(sl::BinaryOp::Mod, gen_int(depth - 1), gen_int(depth - 1));
            case 6: return seq_len(pick_seq_var());
            default: return seq_index(pick_seq_var(), gen_int(depth - 1));
        }
    }

    sl::ExprPtr pick_seq_var() {
        return var(seq_vars_[pick(0, (int)seq_vars_.size() - 1)], sl::Type::IntSeq);
    }

    sl::ExprPtr gen_bool(int depth) {
        if (depth <= 0 || pick(0, 4) == 0) {
            if (!bool_vars_.empty() && pick(0, 2) == 0)
                return var(bool_vars_[pick(0, (int)bool_vars_.size() - 1)], sl::Type::Bool);
            if (pick(0, 2) == 0) return bool_lit(pick(0, 1) == 1);
            // comparison leaf keeps even depth-0 formulas interesting
            return gen_cmp(0);
        }
        int c = pick(0, 7);
        switch (c) {
            case 0: return unary(sl::UnaryOp::Not, gen_bool(depth - 1));
            case 1: return binary(sl::BinaryOp::And, gen_bool(depth - 1), gen_bool(depth - 1));
            case 2: return binary(sl::BinaryOp::Or, gen_bool(depth - 1), gen_bool(depth - 1));
            case 3:
                return binary(sl::BinaryOp::Implies, gen_bool(depth - 1), gen_bool(depth - 1));
            case 4: return binary(sl::BinaryOp::Iff, gen_bool(depth - 1), gen_bool(depth - 1));
            case 5:
            case 6: return gen_cmp(depth - 1);
            default: {
                if (quant_depth_ >= 2) return gen_cmp(depth - 1);
                std::string name = "q" + std::to_string(quant_depth_);
                ++quant_depth_;
                int_vars_.push_back(name);
                auto body = gen_bool(depth - 1);
                int_vars_.pop_back();
                --quant_depth_;
                return quantified(pick(0, 1) == 0 ? sl::Quantifier::Forall
                                                  : sl::Quantifier::Exists,
                                  name, std::move(body));
            }
        }
    }

    sl::ExprPtr gen_cmp(int depth) {
        static const sl::BinaryOp ops[] = {sl::BinaryOp::Eq, sl::BinaryOp::Ne, sl::BinaryOp::Lt,
                                           sl::BinaryOp::Le, sl::BinaryOp::Gt, sl::BinaryOp::Ge};
        return binary(ops[pick(0, 5)], gen_int(depth), gen_int(depth));
    }

    std::mt19937_64 rng_;
    sl::Signature sig_;
    sl::EvaluationBounds bounds_;
    std::vector<std::string> int_vars_;
    std::vector<std::string> bool_vars_;
    std::vector<std::string> seq_vars_;
    int quant_depth_ = 0;
};

}  // namespace formula_gen
