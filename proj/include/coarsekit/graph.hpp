#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

namespace coarsekit::graph {

using Adjacency = std::vector<std::vector<std::size_t>>;

template <class W>
using WeightedAdjacency = std::vector<std::vector<std::pair<std::size_t, W>>>;

inline constexpr long unreachable = -1;

/// Hop counts from `source`; `unreachable` where no path exists. When `active`
/// is given only vertices with active[v] are traversed.
inline std::vector<long> bfs(const Adjacency& adj, std::size_t source, const std::vector<char>* active = nullptr)
{
    std::vector<long> dist(adj.size(), unreachable);
    if (active && !(*active)[source]) return dist;
    std::queue<std::size_t> q;
    dist[source] = 0;
    q.push(source);
    while (!q.empty()) {
        auto u = q.front();
        q.pop();
        for (auto v : adj[u]) {
            if (dist[v] != unreachable) continue;
            if (active && !(*active)[v]) continue;
            dist[v] = dist[u] + 1;
            q.push(v);
        }
    }
    return dist;
}

/// Component id per vertex (ids dense from 0); inactive vertices get -1.
inline std::vector<long> components(const Adjacency& adj, const std::vector<char>* active = nullptr)
{
    std::vector<long> comp(adj.size(), -1);
    long next = 0;
    for (std::size_t s = 0; s < adj.size(); ++s) {
        if (comp[s] != -1 || (active && !(*active)[s])) continue;
        std::vector<std::size_t> stack{s};
        comp[s] = next;
        while (!stack.empty()) {
            auto u = stack.back();
            stack.pop_back();
            for (auto v : adj[u]) {
                if (comp[v] != -1 || (active && !(*active)[v])) continue;
                comp[v] = next;
                stack.push_back(v);
            }
        }
        ++next;
    }
    return comp;
}

inline std::size_t component_count(const std::vector<long>& comp)
{
    long m = -1;
    for (auto c : comp) m = std::max(m, c);
    return static_cast<std::size_t>(m + 1);
}

/// Single-source shortest paths with nonnegative weights of any totally
/// ordered additive type. Ties are broken by vertex index so the result and
/// the settle order are deterministic.
template <class W>
std::vector<std::optional<W>> dijkstra(const WeightedAdjacency<W>& adj, std::size_t source)
{
    std::vector<std::optional<W>> dist(adj.size());
    std::vector<char> done(adj.size(), 0);
    using Item = std::pair<W, std::size_t>;
    auto later = [](const Item& a, const Item& b) {
        if (a.first != b.first) return b.first < a.first;
        return a.second > b.second;
    };
    std::priority_queue<Item, std::vector<Item>, decltype(later)> heap(later);
    dist[source] = W{};
    heap.emplace(W{}, source);
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (done[u]) continue;
        done[u] = 1;
        for (const auto& [v, w] : adj[u]) {
            if (done[v]) continue;
            W cand = d + w;
            if (!dist[v] || cand < *dist[v]) {
                dist[v] = cand;
                heap.emplace(std::move(cand), v);
            }
        }
    }
    return dist;
}

}  // namespace coarsekit::graph
