#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "gmrf/sparse.hpp"

namespace gmrf {

enum class OrderingScheme { amd, identity, rcm };

inline const char* to_string(OrderingScheme s) {
    switch (s) {
        case OrderingScheme::amd: return "amd";
        case OrderingScheme::identity: return "identity";
        case OrderingScheme::rcm: return "rcm";
    }
    return "?";
}

inline OrderingScheme ordering_from_string(const std::string& s) {
    if (s == "amd") return OrderingScheme::amd;
    if (s == "identity") return OrderingScheme::identity;
    if (s == "rcm") return OrderingScheme::rcm;
    throw std::invalid_argument("unknown reordering scheme: " + s);
}

/// perm maps new index -> old index; inverse maps old -> new.
struct Permutation {
    std::vector<index> perm;
    std::vector<index> inverse;

    index n() const { return static_cast<index>(perm.size()); }

    static Permutation identity(index n) {
        Permutation p;
        p.perm.resize(n);
        std::iota(p.perm.begin(), p.perm.end(), index{0});
        p.inverse = p.perm;
        return p;
    }

    static Permutation from_order(std::vector<index> order) {
        Permutation p;
        p.perm = std::move(order);
        p.inverse.assign(p.perm.size(), -1);
        for (index k = 0; k < p.n(); ++k) {
            index old = p.perm[k];
            if (old < 0 || old >= p.n() || p.inverse[old] != -1)
                throw std::invalid_argument("permutation is not a bijection");
            p.inverse[old] = k;
        }
        return p;
    }
};

namespace detail {

/// Off-diagonal adjacency (both triangles) as CSR.
struct Adjacency {
    index n = 0;
    std::vector<index> ptr;
    std::vector<index> idx;

    index degree(index i) const { return ptr[i + 1] - ptr[i]; }
};

inline Adjacency build_adjacency(const SparsityPattern& p) {
    Adjacency g;
    g.n = p.n;
    g.ptr.assign(p.n + 1, 0);
    for (index j = 0; j < p.n; ++j) {
        for (index q = p.col_ptr[j]; q < p.col_ptr[j + 1]; ++q) {
            index i = p.row_idx[q];
            if (i == j) continue;
            ++g.ptr[i + 1];
            ++g.ptr[j + 1];
        }
    }
    std::partial_sum(g.ptr.begin(), g.ptr.end(), g.ptr.begin());
    g.idx.resize(g.ptr.back());
    std::vector<index> next(g.ptr.begin(), g.ptr.end() - 1);
    for (index j = 0; j < p.n; ++j) {
        for (index q = p.col_ptr[j]; q < p.col_ptr[j + 1]; ++q) {
            index i = p.row_idx[q];
            if (i == j) continue;
            g.idx[next[i]++] = j;
            g.idx[next[j]++] = i;
        }
    }
    for (index i = 0; i < g.n; ++i) std::sort(g.idx.begin() + g.ptr[i], g.idx.begin() + g.ptr[i + 1]);
    return g;
}

/// Minimum-degree ordering on a quotient graph with element absorption and
/// the approximate external degree bound. Ties broken by smallest index.
inline std::vector<index> min_degree_order(const Adjacency& g) {
    const index n = g.n;
    std::vector<index> order;
    order.reserve(n);
    if (n == 0) return order;

    enum class State : unsigned char { variable, element, dead };
    std::vector<State> state(n, State::variable);
    std::vector<std::vector<index>> vars(n);   // variable -> variable neighbors, element -> members
    std::vector<std::vector<index>> elems(n);  // variable -> adjacent elements
    std::vector<index> degree(n);

    for (index i = 0; i < n; ++i) {
        vars[i].assign(g.idx.begin() + g.ptr[i], g.idx.begin() + g.ptr[i + 1]);
        degree[i] = g.degree(i);
    }

    // degree buckets as intrusive doubly linked lists
    std::vector<index> head(n + 1, -1), nxt(n, -1), prv(n, -1);
    auto list_insert = [&](index i) {
        index d = degree[i];
        nxt[i] = head[d];
        prv[i] = -1;
        if (head[d] >= 0) prv[head[d]] = i;
        head[d] = i;
    };
    auto list_remove = [&](index i) {
        index d = degree[i];
        if (prv[i] >= 0)
            nxt[prv[i]] = nxt[i];
        else
            head[d] = nxt[i];
        if (nxt[i] >= 0) prv[nxt[i]] = prv[i];
    };
    for (index i = 0; i < n; ++i) list_insert(i);

    std::vector<index> mark(n, -1);     // stamped with the pivot
    std::vector<index> external(n);     // |Le \ Lk| per touched element
    std::vector<index> touched;         // elements whose external count is valid
    std::vector<index> front;           // Lk, the new element's members
    index mindeg = 0;
    index stamp = 0;

    auto prune_live = [&](std::vector<index>& list, State keep) {
        std::size_t out = 0;
        for (index v : list)
            if (state[v] == keep) list[out++] = v;
        list.resize(out);
    };

    for (index nel = 0; nel < n; ++nel) {
        while (head[mindeg] < 0) ++mindeg;
        index k = head[mindeg];
        for (index i = nxt[k]; i >= 0; i = nxt[i]) k = std::min(k, i);
        list_remove(k);
        order.push_back(k);

        // Lk = live variable neighbors plus members of adjacent elements
        ++stamp;
        front.clear();
        mark[k] = stamp;
        for (index v : vars[k]) {
            if (state[v] == State::variable && mark[v] != stamp) {
                mark[v] = stamp;
                front.push_back(v);
            }
        }
        for (index e : elems[k]) {
            if (state[e] != State::element) continue;
            for (index v : vars[e]) {
                if (state[v] == State::variable && mark[v] != stamp) {
                    mark[v] = stamp;
                    front.push_back(v);
                }
            }
            state[e] = State::dead;
            vars[e].clear();
            vars[e].shrink_to_fit();
        }
        std::sort(front.begin(), front.end());

        state[k] = State::element;
        vars[k] = front;
        elems[k].clear();

        // |Le \ Lk| for every element still adjacent to the front
        touched.clear();
        for (index i : front) {
            prune_live(elems[i], State::element);
            for (index e : elems[i]) {
                if (mark[e] != stamp) {
                    mark[e] = stamp;
                    prune_live(vars[e], State::variable);
                    external[e] = 0;
                    for (index v : vars[e])
                        if (mark[v] != stamp) ++external[e];
                    touched.push_back(e);
                }
            }
        }
        // elements fully covered by the new one are absorbed
        for (index e : touched) {
            if (external[e] == 0) {
                state[e] = State::dead;
                vars[e].clear();
                vars[e].shrink_to_fit();
            }
        }

        const index front_size = static_cast<index>(front.size());
        for (index i : front) {
            list_remove(i);
            // thin the variable list: neighbors inside Lk are covered by element k
            std::size_t out = 0;
            for (index v : vars[i])
                if (state[v] == State::variable && mark[v] != stamp) vars[i][out++] = v;
            vars[i].resize(out);

            index d = front_size - 1 + static_cast<index>(vars[i].size());
            std::size_t eout = 0;
            for (index e : elems[i]) {
                if (state[e] != State::element) continue;
                elems[i][eout++] = e;
                d += external[e];
            }
            elems[i].resize(eout);
            elems[i].push_back(k);

            index bound = n - (nel + 1) - 1;
            degree[i] = std::clamp(std::min(d, degree[i] + front_size - 1), index{0}, std::max(bound, index{0}));
            list_insert(i);
            mindeg = std::min(mindeg, degree[i]);
        }
    }
    return order;
}

inline std::vector<index> rcm_order(const Adjacency& g) {
    const index n = g.n;
    std::vector<index> order;
    order.reserve(n);
    std::vector<char> visited(n, 0);
    std::vector<index> level, next_level;

    auto bfs = [&](index root, std::vector<index>* out) {
        std::vector<char> seen(n, 0);
        level.assign(1, root);
        seen[root] = 1;
        index last = root;
        while (!level.empty()) {
            next_level.clear();
            for (index u : level) {
                if (out) out->push_back(u);
                for (index p = g.ptr[u]; p < g.ptr[u + 1]; ++p) {
                    index v = g.idx[p];
                    if (!seen[v] && !visited[v]) {
                        seen[v] = 1;
                        next_level.push_back(v);
                    }
                }
            }
            std::sort(next_level.begin(), next_level.end(), [&](index a, index b) {
                return std::make_pair(g.degree(a), a) < std::make_pair(g.degree(b), b);
            });
            if (!next_level.empty()) last = next_level.front();
            std::swap(level, next_level);
        }
        return last;
    };

    for (index s = 0; s < n; ++s) {
        if (visited[s]) continue;
        // pseudo-peripheral start: farthest low-degree node from the seed
        index root = bfs(s, nullptr);
        std::vector<index> comp;
        bfs(root, &comp);
        for (index u : comp) visited[u] = 1;
        order.insert(order.end(), comp.begin(), comp.end());
    }
    std::reverse(order.begin(), order.end());
    return order;
}

}  // namespace detail

/// Fill-reducing ordering. Nodes whose degree exceeds max(16, 10*sqrt(n))
/// are treated as dense: they are excluded from the scheme and placed last,
/// in ascending index order. The identity scheme never reorders.
inline Permutation order(const SymmetricSparseMatrix& q, OrderingScheme scheme) {
    const index n = q.n();
    if (scheme == OrderingScheme::identity) return Permutation::identity(n);

    detail::Adjacency g = detail::build_adjacency(q.pattern);

    const index dense_threshold = std::max<index>(16, static_cast<index>(10.0 * std::sqrt(static_cast<double>(n))));
    std::vector<index> sparse_nodes, dense_nodes;
    for (index i = 0; i < n; ++i)
        (g.degree(i) >= dense_threshold ? dense_nodes : sparse_nodes).push_back(i);

    if (dense_nodes.empty()) {
        std::vector<index> ord = scheme == OrderingScheme::amd ? detail::min_degree_order(g)
                                                               : detail::rcm_order(g);
        return Permutation::from_order(std::move(ord));
    }

    // compact subgraph on the sparse nodes
    std::vector<index> to_sub(n, -1);
    for (index s = 0; s < static_cast<index>(sparse_nodes.size()); ++s) to_sub[sparse_nodes[s]] = s;
    detail::Adjacency sub;
    sub.n = static_cast<index>(sparse_nodes.size());
    sub.ptr.assign(sub.n + 1, 0);
    for (index s = 0; s < sub.n; ++s) {
        index i = sparse_nodes[s];
        for (index p = g.ptr[i]; p < g.ptr[i + 1]; ++p)
            if (to_sub[g.idx[p]] >= 0) ++sub.ptr[s + 1];
    }
    std::partial_sum(sub.ptr.begin(), sub.ptr.end(), sub.ptr.begin());
    sub.idx.resize(sub.ptr.back());
    std::vector<index> next(sub.ptr.begin(), sub.ptr.end() - 1);
    for (index s = 0; s < sub.n; ++s) {
        index i = sparse_nodes[s];
        for (index p = g.ptr[i]; p < g.ptr[i + 1]; ++p) {
            index t = to_sub[g.idx[p]];
            if (t >= 0) sub.idx[next[s]++] = t;
        }
    }

    std::vector<index> sub_order = scheme == OrderingScheme::amd ? detail::min_degree_order(sub)
                                                                 : detail::rcm_order(sub);
    std::vector<index> ord;
    ord.reserve(n);
    for (index s : sub_order) ord.push_back(sparse_nodes[s]);
    ord.insert(ord.end(), dense_nodes.begin(), dense_nodes.end());
    return Permutation::from_order(std::move(ord));
}

}  // namespace gmrf
