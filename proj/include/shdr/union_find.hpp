#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

namespace shdr {

/// Disjoint sets with path halving and union by size.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

    std::size_t component_size(std::size_t x) { return size_[find(x)]; }
    std::size_t size() const { return parent_.size(); }

    /// Component id per element, numbered by first occurrence.
    std::vector<int> labels() {
        std::vector<int> root_label(parent_.size(), -1);
        std::vector<int> out(parent_.size());
        int next = 0;
        for (std::size_t i = 0; i < parent_.size(); ++i) {
            const std::size_t r = find(i);
            if (root_label[r] < 0) root_label[r] = next++;
            out[i] = root_label[r];
        }
        return out;
    }

    /// Component sizes, largest first.
    std::vector<std::size_t> component_sizes() {
        std::vector<std::size_t> sizes;
        for (std::size_t i = 0; i < parent_.size(); ++i)
            if (find(i) == i) sizes.push_back(size_[i]);
        std::sort(sizes.begin(), sizes.end(), std::greater<>());
        return sizes;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

}  // namespace shdr
