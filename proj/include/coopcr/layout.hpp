#pragma once

#include <cstddef>
#include <vector>

#include "coopcr/policy.hpp"
#include "coopcr/system_params.hpp"

namespace coopcr {

/// Flattening scheme for policy tables used by every LP/solver in the
/// project: the idle block comes first, then the busy block, each SU-major
/// with its level-0 entry included.
struct VarLayout {
    std::vector<std::size_t> offset;  // per-SU start within one block
    std::size_t block = 0;            // size of one block (= total_levels)

    explicit VarLayout(const SystemParams& p) {
        offset.reserve(p.num_sus());
        for (std::size_t s = 0; s < p.num_sus(); ++s) {
            offset.push_back(block);
            block += p.num_levels(s);
        }
    }

    std::size_t idle(std::size_t s, std::size_t i) const { return offset[s] + i; }
    std::size_t busy(std::size_t s, std::size_t i) const { return block + offset[s] + i; }
    std::size_t size() const { return 2 * block; }

    JointPolicy unflatten(const SystemParams& p, const std::vector<double>& x) const {
        JointPolicy j{zero_table_like(p), zero_table_like(p)};
        for (std::size_t s = 0; s < p.num_sus(); ++s)
            for (std::size_t i = 0; i < p.num_levels(s); ++i) {
                j.q_e[s][i] = x[idle(s, i)];
                j.q_b[s][i] = x[busy(s, i)];
            }
        return j;
    }

    std::vector<double> flatten(const SystemParams& p, const JointPolicy& j) const {
        std::vector<double> x(size(), 0.0);
        for (std::size_t s = 0; s < p.num_sus(); ++s)
            for (std::size_t i = 0; i < p.num_levels(s); ++i) {
                x[idle(s, i)] = j.q_e[s][i];
                x[busy(s, i)] = j.q_b[s][i];
            }
        return x;
    }
};

}  // namespace coopcr
