#pragma once

// Exhaustive pairwise union-find partitioning, the independent oracle for the
// greedy clustering implementation. Partitions are canonicalized as sorted
// sets of sorted sample_index vectors so they compare structurally.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "tmprob/distribution.hpp"

namespace bruteforce {

using Partition = std::set<std::vector<int>>;

class UnionFind {
   public:
    explicit UnionFind(size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    size_t find(size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(size_t a, size_t b) { parent_[find(a)] = find(b); }

   private:
    std::vector<size_t> parent_;
};

// All-pairs comparison partition: valid samples joined whenever the oracle
// says equivalent; invalid samples always alone.
inline Partition bruteforce_partition(const std::vector<tmprob::OutputSample>& samples,
                                      const tmprob::EquivFn& oracle) {
    UnionFind uf(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
        if (!samples[i].valid()) continue;
        for (size_t j = i + 1; j < samples.size(); ++j) {
            if (!samples[j].valid()) continue;
            if (oracle(samples[i], samples[j])) uf.unite(i, j);
        }
    }
    std::map<size_t, std::vector<int>> groups;
    for (size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].valid())
            groups[uf.find(i)].push_back(samples[i].sample_index);
        else
            groups[samples.size() + i].push_back(samples[i].sample_index);
    }
    Partition out;
    for (auto& [_, members] : groups) {
        std::sort(members.begin(), members.end());
        out.insert(members);
    }
    return out;
}

inline Partition partition_of(const std::vector<tmprob::MeaningClass>& classes) {
    Partition out;
    for (const auto& mc : classes)
        out.insert(std::vector<int>(mc.member_indices.begin(), mc.member_indices.end()));
    return out;
}

}  // namespace bruteforce
