#include "pdmsort/params.hpp"

#include <algorithm>
#include <sstream>

namespace pdmsort {

namespace {

std::uint64_t cdiv(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

// Smallest x with 256 x^4 D B >= D^4, i.e. ceil(D / (4 (DB)^(1/4))).
std::uint64_t leader_buffer_width(std::uint64_t B, std::uint64_t D) {
    using u128 = unsigned __int128;
    const u128 d4 = static_cast<u128>(D) * D * D * D;
    const u128 db = static_cast<u128>(D) * B;
    std::uint64_t x = 1;
    while (static_cast<u128>(256) * x * x * x * x * db < d4) {
        ++x;
    }
    return x;
}

void check_dims(std::uint64_t m, std::uint64_t B, std::uint64_t D) {
    if (m == 0 || B == 0 || D == 0) {
        throw ParamsError("m, B and D must be positive");
    }
    if (D > m) {
        throw ParamsError("D > m");
    }
}

void require_valid(const GuideParams& p, std::uint64_t m, std::uint64_t B, std::uint64_t D) {
    auto violations = validate_params(p, m, B, D);
    if (!violations.empty()) {
        std::string msg = "parameters violate constraints:";
        for (const auto& v : violations) {
            msg += " [" + v + "]";
        }
        throw ParamsError(msg);
    }
}

}  // namespace

std::string to_string(const GuideParams& p) {
    std::ostringstream os;
    os << "r=" << p.r << " s=" << p.s << " Dbar=" << p.dbar << " D1=" << p.d1 << " D2=" << p.d2
       << " D4=" << p.d4 << " D5=" << p.d5 << " DL=" << p.dl << " q=" << p.q;
    return os.str();
}

std::uint64_t isqrt(std::uint64_t x) {
    std::uint64_t r = 0;
    std::uint64_t bit = std::uint64_t{1} << 62;
    while (bit > x) {
        bit >>= 2;
    }
    while (bit != 0) {
        if (x >= r + bit) {
            x -= r + bit;
            r = (r >> 1) + bit;
        } else {
            r >>= 1;
        }
        bit >>= 2;
    }
    return r;
}

std::pair<std::uint64_t, std::uint64_t> lemma1_f(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) {
        throw ParamsError("lemma1_f needs positive arguments");
    }
    if (a == 1) {
        return {a, b};
    }
    if (a >= b) {
        return {a / b * b, b};
    }
    if (a + 1 == b) {
        return {a, a};
    }
    // 2 <= a <= b - 2
    if ((a - 1) * (a - 1) <= b) {
        return {a, b / a * a};
    }
    std::uint64_t c = cdiv(b, a);
    std::uint64_t a2 = b / c;
    return {a2, c * a2};
}

bool general_preconditions(std::uint64_t m, std::uint64_t B, std::uint64_t D) {
    return m >= 8 && D >= 4 && B >= 16 && D * D >= m && D <= m;
}

GuideParams compute_params_general(std::uint64_t m, std::uint64_t B, std::uint64_t D, bool unchecked) {
    check_dims(m, B, D);
    if (!unchecked && !general_preconditions(m, B, D)) {
        throw ParamsError("general recipe needs m >= 8, D >= 4, B >= 16 and sqrt(m) <= D <= m");
    }
    GuideParams p;
    p.dl = leader_buffer_width(B, D);
    if (p.dl >= m) {
        throw ParamsError("no room for the leader buffer");
    }
    std::uint64_t dtilde = std::min(D, m - p.dl) / 2;
    if (dtilde == 0) {
        throw ParamsError("general recipe needs D >= 2");
    }
    std::uint64_t t = std::max<std::uint64_t>(isqrt(dtilde / B), 1);
    std::tie(p.s, p.dbar) = lemma1_f(t, dtilde);
    if (m < p.dbar + 2 * p.dl) {
        throw ParamsError("memory too small for the general recipe");
    }
    p.d5 = std::min((m - p.dbar - 2 * p.dl) / 2, D);
    std::uint64_t r2 = p.dbar > 1 ? (m - 1) * p.s * B / (p.dbar - 1) - 1 : m * 2 + 2;
    std::uint64_t rest = m - p.dbar - 2 * p.dl;
    std::uint64_t r5 = rest >= p.d5 ? (rest - p.d5) / p.s : 0;
    p.r = std::min(r2 / 2, r5);
    p.q = cdiv((p.r + 1) * (p.dbar - 1), p.s * B);
    p.d2 = m > p.q ? std::min(m - p.q, D) : 0;
    p.d4 = 2 * p.dbar;
    p.d1 = std::min(D, m / 2);
    require_valid(p, m, B, D);
    return p;
}

bool simple_applicable(std::uint64_t m, std::uint64_t B, std::uint64_t D) {
    return D >= 1 && m >= 6 * D && B >= D;
}

GuideParams compute_params_simple(std::uint64_t m, std::uint64_t B, std::uint64_t D) {
    check_dims(m, B, D);
    if (!simple_applicable(m, B, D)) {
        throw ParamsError("simple preset needs m >= 6D and B >= D");
    }
    GuideParams p;
    p.s = 1;
    p.d2 = p.d5 = p.dl = D;
    if (D == 1) {
        p.dbar = 1;
        p.d4 = 1;
    } else {
        p.dbar = D / 2;
        p.d4 = 2 * p.dbar;
    }
    p.r = m - 4 * D;
    p.d1 = std::min(D, m / 2);
    p.q = cdiv((p.r + 1) * (p.dbar - 1), p.s * B);
    require_valid(p, m, B, D);
    return p;
}

std::vector<std::string> validate_params(const GuideParams& p, std::uint64_t m, std::uint64_t B, std::uint64_t D) {
    std::vector<std::string> out;
    auto check = [&](bool ok, const char* what) {
        if (!ok) {
            out.push_back(std::string(what) + " violated");
        }
    };
    check(p.s >= 1, "s ≥ 1");
    check(p.dbar >= 1, "D̄ ≥ 1");
    check(p.dbar <= cdiv(D, 2), "D̄ ≤ ⌈D/2⌉");
    check(p.d2 >= 1 && p.d2 <= D, "1 ≤ D2 ≤ D");
    check(p.d4 >= 1 && p.d4 <= D, "1 ≤ D4 ≤ D");
    check(p.d5 >= 1 && p.d5 <= D, "1 ≤ D5 ≤ D");
    check(p.dl >= 1 && p.dl <= D, "1 ≤ D_L ≤ D");
    check(p.r >= 2 && p.r <= m, "2 ≤ r ≤ m");
    if (p.s >= 1 && p.dbar >= 1) {
        // (r+1)(D̄-1)/(sB) + D2 <= m, cleared of the fraction
        unsigned __int128 lhs = static_cast<unsigned __int128>(p.r + 1) * (p.dbar - 1) +
                                static_cast<unsigned __int128>(p.d2) * p.s * B;
        check(lhs <= static_cast<unsigned __int128>(m) * p.s * B, "(r+1)(D̄−1)/(sB) + D2 ≤ m");
        check(p.q == cdiv((p.r + 1) * (p.dbar - 1), p.s * B), "q = ⌈(r+1)(D̄−1)/(sB)⌉");
        check(p.dbar % p.s == 0, "s | D̄");
        check(p.d4 % p.dbar == 0, "D̄ | D4");
    }
    check(p.d4 + p.dl <= m, "D4 + D_L ≤ m");
    check(p.r * p.s + p.dbar + p.d5 + 2 * p.dl <= m, "r·s + D̄ + D5 + 2·D_L ≤ m");
    check(p.d1 == std::min(D, m / 2), "D1 = min{D, ⌊m/2⌋}");
    return out;
}

Mode parse_mode(const std::string& s) {
    if (s == "auto") return Mode::Auto;
    if (s == "simple") return Mode::Simple;
    if (s == "general") return Mode::General;
    if (s == "striping") return Mode::Striping;
    if (s == "sequential") return Mode::Sequential;
    throw ParamsError("unknown mode: " + s);
}

const char* mode_name(Mode mode) {
    switch (mode) {
        case Mode::Auto: return "auto";
        case Mode::Simple: return "simple";
        case Mode::General: return "general";
        case Mode::Striping: return "striping";
        case Mode::Sequential: return "sequential";
    }
    return "?";
}

GuidesortPlan guidesort_plan(std::uint64_t m, std::uint64_t B, std::uint64_t D, Mode mode) {
    GuidesortPlan plan;
    if (mode == Mode::Simple || (mode == Mode::Auto && simple_applicable(m, B, D))) {
        plan.params = compute_params_simple(m, B, D);
        plan.simple = true;
        return plan;
    }
    if (mode != Mode::Auto && mode != Mode::General) {
        throw ParamsError(std::string("not a Guidesort mode: ") + mode_name(mode));
    }
    plan.unchecked = !general_preconditions(m, B, D);
    plan.params = compute_params_general(m, B, D, plan.unchecked);
    return plan;
}

AlgorithmPlan select_algorithm(std::uint64_t m, std::uint64_t B, std::uint64_t D, Mode mode) {
    check_dims(m, B, D);
    switch (mode) {
        case Mode::Sequential:
            return SequentialPlan{};
        case Mode::Striping: {
            std::uint64_t arity = m / D;
            if (arity < 2) {
                throw ParamsError("striping needs m/D >= 2");
            }
            return StripingPlan{arity};
        }
        case Mode::Simple:
        case Mode::General:
            return guidesort_plan(m, B, D, mode);
        case Mode::Auto:
            break;
    }
    if (m <= 3) {
        return SequentialPlan{};
    }
    if (D * D <= m) {
        return StripingPlan{isqrt(m)};
    }
    return guidesort_plan(m, B, D, Mode::Auto);
}

}  // namespace pdmsort
