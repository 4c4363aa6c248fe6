#pragma once

// Independent reference interpreter for the spec mini-language, used as the
// oracle for the production evaluator. Written as typed mutual recursion with
// exception-based errors, deliberately not sharing code with the library
// evaluation path. Also provides its own environment enumeration and
// implication checks for validating diagnosis verdicts.

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmprob/spec_lang.hpp"

namespace refinterp {

namespace sl = tmprob::spec;

struct RefError {
    sl::EvalErrorKind kind;
};

struct RefEnv {
    std::map<std::string, long long> ints;
    std::map<std::string, bool> bools;
    std::map<std::string, std::vector<long long>> seqs;

    static RefEnv from(const sl::Env& env) {
        RefEnv r;
        for (const auto& [name, v] : env) {
            if (std::holds_alternative<long long>(v))
                r.ints[name] = std::get<long long>(v);
            else if (std::holds_alternative<bool>(v))
                r.bools[name] = std::get<bool>(v);
            else
                r.seqs[name] = std::get<std::vector<long long>>(v);
        }
        return r;
    }
};

inline long long eval_int(const sl::Expr& e, RefEnv& env, const sl::EvaluationBounds& b);
inline bool eval_bool(const sl::Expr& e, RefEnv& env, const sl::EvaluationBounds& b);
inline std::vector<long long> eval_seq(const sl::Expr& e, RefEnv& env);

inline std::vector<long long> eval_seq(const sl::Expr& e, RefEnv& env) {
    if (e.kind != sl::ExprKind::Var) throw std::logic_error("seq expression must be a variable");
    return env.seqs.at(e.name);
}

inline long long eval_int(const sl::Expr& e, RefEnv& env, const sl::EvaluationBounds& b) {
    switch (e.kind) {
        case sl::ExprKind::IntLit:
            return e.int_value;
        case sl::ExprKind::Var:
            return env.ints.at(e.name);
        case sl::ExprKind::Unary:
            return -eval_int(*e.lhs, env, b);
        case sl::ExprKind::SeqLen:
            return static_cast<long long>(eval_seq(*e.lhs, env).size());
        case sl::ExprKind::SeqIndex: {
            auto seq = eval_seq(*e.lhs, env);
            long long i = eval_int(*e.rhs, env, b);
            if (i < 0 || i >= static_cast<long long>(seq.size()))
                throw RefError{sl::EvalErrorKind::IndexOutOfRange};
            return seq[static_cast<size_t>(i)];
        }
        case sl::ExprKind::Binary: {
            long long l = eval_int(*e.lhs, env, b);
            long long r = eval_int(*e.rhs, env, b);
            switch (e.bin_op) {
                case sl::BinaryOp::Add: return l + r;
                case sl::BinaryOp::Sub: return l - r;
                case sl::BinaryOp::Mul: return l * r;
                case sl::BinaryOp::Div: {
                    if (r == 0) throw RefError{sl::EvalErrorKind::DivisionByZero};
                    long long mag = r > 0 ? r : -r;
                    long long m = ((l % mag) + mag) % mag;
                    return (l - m) / r;
                }
                case sl::BinaryOp::Mod: {
                    if (r == 0) throw RefError{sl::EvalErrorKind::DivisionByZero};
                    long long mag = r > 0 ? r : -r;
                    return ((l % mag) + mag) % mag;
                }
                default: throw std::logic_error("non-int binary op in int position");
            }
        }
        default:
            throw std::logic_error("non-int expression in int position");
    }
}

inline bool eval_bool(const sl::Expr& e, RefEnv& env, const sl::EvaluationBounds& b) {
    switch (e.kind) {
        case sl::ExprKind::BoolLit:
            return e.bool_value;
        case sl::ExprKind::Var:
            return env.bools.at(e.name);
        case sl::ExprKind::Unary:
            return !eval_bool(*e.lhs, env, b);
        case sl::ExprKind::Quantified: {
            bool is_forall = e.quant == sl::Quantifier::Forall;
            bool had = env.ints.count(e.name) > 0;
            long long saved = had ? env.ints[e.name] : 0;
            bool result = is_forall;
            try {
                for (long long v = b.quantifier_lo; v <= b.quantifier_hi; ++v) {
                    env.ints[e.name] = v;
                    bool bv = eval_bool(*e.lhs, env, b);
                    if (is_forall && !bv) {
                        result = false;
                        break;
                    }
                    if (!is_forall && bv) {
                        result = true;
                        break;
                    }
                }
            } catch (...) {
                if (had)
                    env.ints[e.name] = saved;
                else
                    env.ints.erase(e.name);
                throw;
            }
            if (had)
                env.ints[e.name] = saved;
            else
                env.ints.erase(e.name);
            return result;
        }
        case sl::ExprKind::Binary:
            switch (e.bin_op) {
                case sl::BinaryOp::And:
                    return eval_bool(*e.lhs, env, b) ? eval_bool(*e.rhs, env, b) : false;
                case sl::BinaryOp::Or:
                    return eval_bool(*e.lhs, env, b) ? true : eval_bool(*e.rhs, env, b);
                case sl::BinaryOp::Implies:
                    return eval_bool(*e.lhs, env, b) ? eval_bool(*e.rhs, env, b) : true;
                case sl::BinaryOp::Iff:
                    return eval_bool(*e.lhs, env, b) == eval_bool(*e.rhs, env, b);
                case sl::BinaryOp::Eq:
                case sl::BinaryOp::Ne: {
                    bool eq;
                    if (e.lhs->type == sl::Type::Bool)
                        eq = eval_bool(*e.lhs, env, b) == eval_bool(*e.rhs, env, b);
                    else if (e.lhs->type == sl::Type::IntSeq)
                        eq = eval_seq(*e.lhs, env) == eval_seq(*e.rhs, env);
                    else
                        eq = eval_int(*e.lhs, env, b) == eval_int(*e.rhs, env, b);
                    return e.bin_op == sl::BinaryOp::Eq ? eq : !eq;
                }
                case sl::BinaryOp::Lt:
                    return eval_int(*e.lhs, env, b) < eval_int(*e.rhs, env, b);
                case sl::BinaryOp::Le:
                    return eval_int(*e.lhs, env, b) <= eval_int(*e.rhs, env, b);
                case sl::BinaryOp::Gt:
                    return eval_int(*e.lhs, env, b) > eval_int(*e.rhs, env, b);
                case sl::BinaryOp::Ge:
                    return eval_int(*e.lhs, env, b) >= eval_int(*e.rhs, env, b);
                default:
                    throw std::logic_error("non-bool binary op in bool position");
            }
        default:
            throw std::logic_error("non-bool expression in bool position");
    }
}

struct RefOutcome {
    bool ok = false;
    bool value = false;
    sl::EvalErrorKind err = sl::EvalErrorKind::DivisionByZero;
};

inline RefOutcome ref_evaluate(const sl::ExprPtr& f, const sl::Env& env,
                               const sl::EvaluationBounds& b) {
    RefEnv renv = RefEnv::from(env);
    RefOutcome out;
    try {
        out.value = eval_bool(*f, renv, b);
        out.ok = true;
    } catch (const RefError& e) {
        out.ok = false;
        out.err = e.kind;
    }
    return out;
}

// Independent environment enumeration as nested recursion over variables.
inline void ref_envs_rec(const std::vector<sl::Param>& vars, size_t i,
                         const sl::EvaluationBounds& b, sl::Env& acc,
                         const std::function<void(const sl::Env&)>& fn) {
    if (i == vars.size()) {
        fn(acc);
        return;
    }
    const auto& v = vars[i];
    if (v.type == sl::Type::Int) {
        for (long long x = -b.int_bound; x <= b.int_bound; ++x) {
            acc[v.name] = x;
            ref_envs_rec(vars, i + 1, b, acc, fn);
        }
    } else if (v.type == sl::Type::Bool) {
        for (bool x : {false, true}) {
            acc[v.name] = x;
            ref_envs_rec(vars, i + 1, b, acc, fn);
        }
    } else {
        std::vector<std::vector<long long>> seqs;
        seqs.push_back({});
        std::vector<std::vector<long long>> frontier = {{}};
        for (long long len = 1; len <= b.max_seq_len; ++len) {
            std::vector<std::vector<long long>> next;
            for (const auto& base : frontier)
                for (long long x = -b.int_bound; x <= b.int_bound; ++x) {
                    auto s = base;
                    s.push_back(x);
                    next.push_back(std::move(s));
                }
            for (const auto& s : next) seqs.push_back(s);
            frontier = std::move(next);
        }
        for (const auto& s : seqs) {
            acc[v.name] = s;
            ref_envs_rec(vars, i + 1, b, acc, fn);
        }
    }
    acc.erase(v.name);
}

inline void ref_for_each_env(const std::vector<sl::Param>& vars, const sl::EvaluationBounds& b,
                             const std::function<void(const sl::Env&)>& fn) {
    sl::Env acc;
    ref_envs_rec(vars, 0, b, acc, fn);
}

// Reference bounded implication with the library's error convention.
inline bool ref_implies(const sl::ExprPtr& f, const sl::ExprPtr& g,
                        const std::vector<sl::Param>& vars, const sl::EvaluationBounds& b,
                        const sl::ExprPtr& guard = nullptr) {
    bool holds = true;
    ref_for_each_env(vars, b, [&](const sl::Env& env) {
        if (!holds) return;
        if (guard) {
            RefOutcome gv = ref_evaluate(guard, env, b);
            if (!gv.ok || !gv.value) return;
        }
        RefOutcome a = ref_evaluate(f, env, b);
        RefOutcome c = ref_evaluate(g, env, b);
        if (!a.ok && !c.ok) {
            if (a.err != c.err) holds = false;
            return;
        }
        if (!a.ok || !c.ok) {
            holds = false;
            return;
        }
        if (a.value && !c.value) holds = false;
    });
    return holds;
}

}  // namespace refinterp
