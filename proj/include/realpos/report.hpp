#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "realpos/linalg.hpp"

namespace realpos {

/// One line of a verification suite. A `check` condition decides whether the
/// report passes; an `info` condition only records a verdict.
struct Condition {
    enum class Kind { check, info };

    std::string name;
    Kind kind = Kind::check;
    bool passed = true;
    double residual = 0.0;
    double tolerance = 0.0;
    std::string note;
};

/// Pass/fail record for one suite on one instance.
struct VerificationReport {
    std::string suite;
    std::string inputs_digest;
    std::optional<std::uint64_t> seed;
    std::vector<Condition> conditions;
    std::map<std::string, double> values;  // auxiliary numbers worth keeping
    double wall_time_s = 0.0;

    /// Records a check that passes iff residual <= tolerance.
    Condition& check(std::string name, double residual, double tolerance, std::string note = {}) {
        const bool ok = std::isfinite(residual) ? residual <= tolerance : false;
        conditions.push_back({std::move(name), Condition::Kind::check, ok, residual, tolerance, std::move(note)});
        return conditions.back();
    }

    /// Records a boolean check; failures carry residual 1 against tolerance 0.
    Condition& check_true(std::string name, bool ok, std::string note = {}) {
        conditions.push_back({std::move(name), Condition::Kind::check, ok, ok ? 0.0 : 1.0, 0.0, std::move(note)});
        return conditions.back();
    }

    Condition& info(std::string name, bool verdict, double residual = 0.0, double tolerance = 0.0,
                    std::string note = {}) {
        conditions.push_back({std::move(name), Condition::Kind::info, verdict, residual, tolerance, std::move(note)});
        return conditions.back();
    }

    [[nodiscard]] bool passed() const {
        for (const auto& c : conditions) {
            if (c.kind == Condition::Kind::check && !c.passed) return false;
        }
        return true;
    }

    [[nodiscard]] const Condition* find(const std::string& name) const {
        for (const auto& c : conditions) {
            if (c.name == name) return &c;
        }
        return nullptr;
    }
};

/// FNV-1a over the IEEE bytes of the entries, hex encoded.
inline std::string digest(const std::vector<const CMatrix*>& inputs) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* p, std::size_t len) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= b[i];
            h *= 1099511628211ULL;
        }
    };
    for (const CMatrix* m : inputs) {
        const std::int64_t dims[2] = {m->rows(), m->cols()};
        mix(dims, sizeof dims);
        for (Eigen::Index j = 0; j < m->cols(); ++j) {
            for (Eigen::Index i = 0; i < m->rows(); ++i) {
                const double parts[2] = {(*m)(i, j).real(), (*m)(i, j).imag()};
                mix(parts, sizeof parts);
            }
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string digest(const CMatrix& x) { return digest(std::vector<const CMatrix*>{&x}); }

}  // namespace realpos
