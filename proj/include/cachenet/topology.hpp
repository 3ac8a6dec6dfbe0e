// Cache network model: weighted graph, per-node capacities, content sources,
// deterministic shortest-path routing and request-class construction.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cachenet/rng.hpp"

namespace cachenet {

using NodeId = int;
using ContentId = int;

struct TopologyError : std::runtime_error {
    explicit TopologyError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Edge {
    NodeId a = -1;
    NodeId b = -1;
    double cost_ab = 0.0;  // transfer cost a -> b
    double cost_ba = 0.0;  // transfer cost b -> a
};

// Bulk source assignment: every content gets `count` distinct source nodes,
// drawn deterministically from `candidates` (all nodes when empty).
struct SourceRule {
    int count = 1;
    std::uint64_t seed = 0;
    std::vector<NodeId> candidates;
};

class Network {
public:
    Network() = default;

    explicit Network(int node_count) { reset(node_count); }

    void reset(int node_count) {
        if (node_count < 1) throw TopologyError("node count must be >= 1");
        n_ = node_count;
        adj_.assign(n_, {});
        cost_.assign(static_cast<std::size_t>(n_) * n_,
                     std::numeric_limits<double>::quiet_NaN());
        cap_.assign(n_, 0);
        source_node_.assign(n_, false);
        edges_.clear();
        sources_.clear();
        rule_.reset();
        requesters_.clear();
        explicit_requesters_ = false;
        catalog_ = 0;
    }

    int node_count() const { return n_; }

    void add_edge(NodeId i, NodeId j, double cost_ij, double cost_ji) {
        check_node(i);
        check_node(j);
        if (i == j) throw TopologyError("self-loop edge");
        if (cost_ij <= 0.0 || cost_ji <= 0.0)
            throw TopologyError("edge cost must be positive");
        if (!std::isnan(at(i, j)))
            throw TopologyError("duplicate edge");
        edges_.push_back({i, j, cost_ij, cost_ji});
        adj_[i].push_back(j);
        adj_[j].push_back(i);
        at(i, j) = cost_ij;
        at(j, i) = cost_ji;
    }

    void add_edge(NodeId i, NodeId j, double cost) { add_edge(i, j, cost, cost); }

    void set_capacity(NodeId i, int budget) {
        check_node(i);
        if (budget < 0) throw TopologyError("capacity must be >= 0");
        cap_[i] = budget;
    }

    void add_source(ContentId c, NodeId i) {
        check_node(i);
        if (c < 0) throw TopologyError("content id must be >= 0");
        auto& v = sources_[c];
        if (std::find(v.begin(), v.end(), i) == v.end()) v.push_back(i);
        source_node_[i] = true;
    }

    void set_source_rule(SourceRule rule) {
        if (rule.count < 1) throw TopologyError("sources-per-content must be >= 1");
        for (NodeId i : rule.candidates) check_node(i);
        rule_ = std::move(rule);
    }

    void set_requesters(std::vector<NodeId> ids) {
        for (NodeId i : ids) check_node(i);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        if (ids.empty()) throw TopologyError("requester list must be non-empty");
        requesters_ = std::move(ids);
        explicit_requesters_ = true;
    }

    // Resolves the bulk source rule for contents 0..catalog_size-1 and checks
    // that every content ends up with at least one source.
    void materialize_sources(int catalog_size) {
        if (catalog_size < 1) throw TopologyError("catalog size must be >= 1");
        if (rule_) {
            std::vector<NodeId> pool = rule_->candidates;
            if (pool.empty()) {
                pool.resize(n_);
                for (int i = 0; i < n_; ++i) pool[i] = i;
            }
            int take = std::min<int>(rule_->count, static_cast<int>(pool.size()));
            for (ContentId c = 0; c < catalog_size; ++c) {
                if (sources_.count(c)) continue;  // explicit lines win
                // per-content generator keeps the assignment independent of
                // catalog size
                std::uint64_t s = rule_->seed;
                s ^= splitmix64(s) + static_cast<std::uint64_t>(c) * 0x9e3779b97f4a7c15ULL;
                Rng rng(splitmix64(s));
                std::vector<NodeId> local = pool;
                for (int k = 0; k < take; ++k) {
                    std::size_t idx = k + rng.uniform_index(local.size() - k);
                    std::swap(local[k], local[idx]);
                    add_source(c, local[k]);
                }
            }
        }
        for (ContentId c = 0; c < catalog_size; ++c) {
            if (!sources_.count(c)) {
                throw TopologyError("content " + std::to_string(c) + " has no source node");
            }
        }
        catalog_ = std::max(catalog_, catalog_size);
    }

    int catalog_size() const { return catalog_; }

    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<NodeId>& neighbors(NodeId i) const { return adj_[i]; }
    int capacity(NodeId i) const { return cap_[i]; }
    const std::vector<int>& capacities() const { return cap_; }

    void set_capacities(std::vector<int> caps) {
        if (static_cast<int>(caps.size()) != n_) throw TopologyError("capacity vector size mismatch");
        for (int b : caps)
            if (b < 0) throw TopologyError("capacity must be >= 0");
        cap_ = std::move(caps);
    }

    // transfer cost from -> to; NaN when not adjacent
    double cost(NodeId from, NodeId to) const { return at(from, to); }

    // symmetric in-place cost update for edge #index (file order)
    void set_edge_cost(std::size_t index, double cost) {
        if (index >= edges_.size()) throw TopologyError("edge index out of range");
        if (cost <= 0.0) throw TopologyError("edge cost must be positive");
        Edge& e = edges_[index];
        e.cost_ab = e.cost_ba = cost;
        at(e.a, e.b) = cost;
        at(e.b, e.a) = cost;
    }

    bool has_source_info() const { return !sources_.empty() || rule_.has_value(); }

    const std::vector<NodeId>& sources(ContentId c) const {
        auto it = sources_.find(c);
        if (it == sources_.end())
            throw TopologyError("content " + std::to_string(c) + " has no source node");
        return it->second;
    }

    bool is_source(NodeId i, ContentId c) const {
        auto it = sources_.find(c);
        if (it == sources_.end()) return false;
        return std::find(it->second.begin(), it->second.end(), i) != it->second.end();
    }

    bool is_source_node(NodeId i) const { return source_node_[i]; }

    // Explicit requester list when given, otherwise all non-source nodes.
    std::vector<NodeId> requesters() const {
        if (explicit_requesters_) return requesters_;
        std::vector<NodeId> out;
        for (NodeId i = 0; i < n_; ++i)
            if (!source_node_[i]) out.push_back(i);
        return out;
    }

    bool connected() const {
        if (n_ <= 1) return true;
        std::vector<char> seen(n_, 0);
        std::vector<NodeId> stack{0};
        seen[0] = 1;
        int reached = 1;
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            for (NodeId v : adj_[u]) {
                if (!seen[v]) {
                    seen[v] = 1;
                    ++reached;
                    stack.push_back(v);
                }
            }
        }
        return reached == n_;
    }

private:
    void check_node(NodeId i) const {
        if (i < 0 || i >= n_)
            throw TopologyError("node id " + std::to_string(i) + " out of range");
    }

    double& at(NodeId i, NodeId j) { return cost_[static_cast<std::size_t>(i) * n_ + j]; }
    double at(NodeId i, NodeId j) const { return cost_[static_cast<std::size_t>(i) * n_ + j]; }

    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<NodeId>> adj_;
    std::vector<double> cost_;  // dense n*n, NaN = no edge
    std::vector<int> cap_;
    std::map<ContentId, std::vector<NodeId>> sources_;
    std::vector<bool> source_node_;
    std::optional<SourceRule> rule_;
    std::vector<NodeId> requesters_;
    bool explicit_requesters_ = false;
    int catalog_ = 0;
};

// A simple path from a requester (front) to a source node (back). Hop costs
// are stored in the data-packet direction: hop_costs[k] is the cost of
// transferring the content from nodes[k+1] to nodes[k].
struct Path {
    ContentId content = -1;
    std::vector<NodeId> nodes;
    std::vector<double> hop_costs;

    double total_cost() const {
        double s = 0.0;
        for (double c : hop_costs) s += c;
        return s;
    }
};

struct RequestClass {
    ContentId content = -1;
    Path path;
    double rate = 0.0;
};

// Shortest-path tree in the data direction: dist[v] is the minimum cost of
// shipping one content unit from v down to the root requester.
struct ShortestPathTree {
    NodeId root = -1;
    std::vector<double> dist;
    std::vector<NodeId> pred;  // previous node toward the root
};

inline ShortestPathTree shortest_path_tree(const Network& net, NodeId root) {
    const int n = net.node_count();
    if (root < 0 || root >= n) throw TopologyError("requester id out of range");
    ShortestPathTree tree;
    tree.root = root;
    tree.dist.assign(n, std::numeric_limits<double>::infinity());
    tree.pred.assign(n, -1);
    tree.dist[root] = 0.0;

    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.push({0.0, root});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > tree.dist[u]) continue;
        for (NodeId v : net.neighbors(u)) {
            double nd = d + net.cost(v, u);  // data direction v -> u
            if (nd < tree.dist[v]) {
                tree.dist[v] = nd;
                tree.pred[v] = u;
                pq.push({nd, v});
            } else if (nd == tree.dist[v] && u < tree.pred[v]) {
                tree.pred[v] = u;  // deterministic tie-break
            }
        }
    }
    return tree;
}

// Minimum data-direction-cost simple path from `requester` to the nearest
// source of `content`; equal-cost sources resolve to the smallest node id.
inline Path route(const Network& net, const ShortestPathTree& tree, ContentId content) {
    NodeId best = -1;
    for (NodeId s : net.sources(content)) {
        if (s == tree.root)
            throw std::invalid_argument("requester is a source of the requested content");
        if (best == -1 || tree.dist[s] < tree.dist[best] ||
            (tree.dist[s] == tree.dist[best] && s < best)) {
            best = s;
        }
    }
    if (best == -1 || !std::isfinite(tree.dist[best]))
        throw TopologyError("no source reachable for content " + std::to_string(content));

    Path p;
    p.content = content;
    for (NodeId v = best; v != -1; v = tree.pred[v]) p.nodes.push_back(v);
    std::reverse(p.nodes.begin(), p.nodes.end());
    p.hop_costs.resize(p.nodes.size() - 1);
    for (std::size_t k = 0; k + 1 < p.nodes.size(); ++k)
        p.hop_costs[k] = net.cost(p.nodes[k + 1], p.nodes[k]);
    return p;
}

inline Path route(const Network& net, NodeId requester, ContentId content) {
    return route(net, shortest_path_tree(net, requester), content);
}

// Replaces every edge cost with a uniform pick from `choices`, applied
// symmetrically per undirected edge. Deterministic for a given seed.
inline Network assign_random_costs(const Network& net, std::span<const double> choices,
                                   std::uint64_t seed) {
    if (choices.empty()) throw std::invalid_argument("cost choices must be non-empty");
    for (double c : choices)
        if (c <= 0.0) throw std::invalid_argument("cost choices must be positive");
    Network out = net;
    Rng rng(substream_seed(seed, Substream::LinkCosts));
    for (std::size_t i = 0; i < out.edges().size(); ++i)
        out.set_edge_cost(i, choices[rng.uniform_index(choices.size())]);
    return out;
}

namespace detail {

inline std::vector<std::string> tokenize(std::string line) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream iss(line);
    std::vector<std::string> toks;
    std::string t;
    while (iss >> t) toks.push_back(t);
    return toks;
}

[[noreturn]] inline void parse_fail(int lineno, const std::string& what) {
    throw TopologyError("line " + std::to_string(lineno) + ": " + what);
}

inline long parse_int(const std::string& s, int lineno, const char* what) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(s, &used);
    } catch (const std::exception&) {
        parse_fail(lineno, std::string("invalid ") + what + " '" + s + "'");
    }
    if (used != s.size()) parse_fail(lineno, std::string("invalid ") + what + " '" + s + "'");
    return v;
}

inline double parse_real(const std::string& s, int lineno, const char* what) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        parse_fail(lineno, std::string("invalid ") + what + " '" + s + "'");
    }
    if (used != s.size()) parse_fail(lineno, std::string("invalid ") + what + " '" + s + "'");
    return v;
}

}  // namespace detail

// Parses the line-oriented topology format:
//   nodes <n>
//   edge <i> <j> <cost_ij> [<cost_ji>]
//   cap <i> <B_i>
//   source <content-id> <node-id>
//   sources random <count-per-content> seed <s> [from <id>...]
//   requesters all|list <ids...>
// Comments start with '#'. Catalog size is supplied later (see
// Network::materialize_sources); content ids are 0..|C|-1.
inline Network load_network(std::string_view text) {
    Network net;
    bool have_nodes = false;
    std::istringstream input{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(input, line)) {
        ++lineno;
        auto toks = detail::tokenize(line);
        if (toks.empty()) continue;
        const std::string& kw = toks[0];
        try {
            if (kw == "nodes") {
                if (have_nodes) detail::parse_fail(lineno, "duplicate nodes line");
                if (toks.size() != 2) detail::parse_fail(lineno, "expected: nodes <n>");
                long n = detail::parse_int(toks[1], lineno, "node count");
                if (n < 1) detail::parse_fail(lineno, "node count must be >= 1");
                net.reset(static_cast<int>(n));
                have_nodes = true;
                continue;
            }
            if (!have_nodes) detail::parse_fail(lineno, "'nodes <n>' must come first");
            if (kw == "edge") {
                if (toks.size() != 4 && toks.size() != 5)
                    detail::parse_fail(lineno, "expected: edge <i> <j> <cost_ij> [<cost_ji>]");
                NodeId i = static_cast<NodeId>(detail::parse_int(toks[1], lineno, "node id"));
                NodeId j = static_cast<NodeId>(detail::parse_int(toks[2], lineno, "node id"));
                double cij = detail::parse_real(toks[3], lineno, "edge cost");
                double cji = toks.size() == 5 ? detail::parse_real(toks[4], lineno, "edge cost") : cij;
                net.add_edge(i, j, cij, cji);
            } else if (kw == "cap") {
                if (toks.size() != 3) detail::parse_fail(lineno, "expected: cap <i> <B_i>");
                NodeId i = static_cast<NodeId>(detail::parse_int(toks[1], lineno, "node id"));
                net.set_capacity(i, static_cast<int>(detail::parse_int(toks[2], lineno, "capacity")));
            } else if (kw == "source") {
                if (toks.size() != 3) detail::parse_fail(lineno, "expected: source <content-id> <node-id>");
                ContentId c = static_cast<ContentId>(detail::parse_int(toks[1], lineno, "content id"));
                NodeId i = static_cast<NodeId>(detail::parse_int(toks[2], lineno, "node id"));
                net.add_source(c, i);
            } else if (kw == "sources") {
                if (toks.size() < 5 || toks[1] != "random" || toks[3] != "seed")
                    detail::parse_fail(lineno,
                                       "expected: sources random <count> seed <s> [from <id>...]");
                SourceRule rule;
                rule.count = static_cast<int>(detail::parse_int(toks[2], lineno, "source count"));
                rule.seed = static_cast<std::uint64_t>(detail::parse_int(toks[4], lineno, "seed"));
                if (toks.size() > 5) {
                    if (toks[5] != "from")
                        detail::parse_fail(lineno, "expected 'from' before candidate list");
                    for (std::size_t k = 6; k < toks.size(); ++k)
                        rule.candidates.push_back(
                            static_cast<NodeId>(detail::parse_int(toks[k], lineno, "node id")));
                    if (rule.candidates.empty())
                        detail::parse_fail(lineno, "'from' needs at least one node id");
                }
                net.set_source_rule(std::move(rule));
            } else if (kw == "requesters") {
                if (toks.size() < 2) detail::parse_fail(lineno, "expected: requesters all|list <ids...>");
                if (toks[1] == "all") {
                    if (toks.size() != 2) detail::parse_fail(lineno, "unexpected tokens after 'all'");
                    // default behaviour: all non-source nodes
                } else if (toks[1] == "list") {
                    std::vector<NodeId> ids;
                    for (std::size_t k = 2; k < toks.size(); ++k)
                        ids.push_back(static_cast<NodeId>(detail::parse_int(toks[k], lineno, "node id")));
                    net.set_requesters(std::move(ids));
                } else {
                    detail::parse_fail(lineno, "expected 'all' or 'list'");
                }
            } else {
                detail::parse_fail(lineno, "unknown directive '" + kw + "'");
            }
        } catch (const TopologyError& e) {
            std::string msg = e.what();
            if (msg.rfind("line ", 0) == 0) throw;
            detail::parse_fail(lineno, msg);
        }
    }
    if (!have_nodes) throw TopologyError("missing 'nodes <n>' line");
    if (!net.connected()) throw TopologyError("graph is not connected");
    if (!net.has_source_info()) throw TopologyError("no source node declared for any content");
    return net;
}

struct Demand {
    NodeId requester = -1;
    ContentId content = -1;
    double rate = 0.0;
};

// One class per (requester, content) pair with positive aggregate rate.
// Pairs whose requester already sources the content are served locally and
// produce no class.
inline std::vector<RequestClass> build_request_classes(const Network& net,
                                                       std::span<const Demand> demand) {
    std::map<std::pair<NodeId, ContentId>, double> rates;
    for (const Demand& d : demand) {
        if (d.rate < 0.0) throw std::invalid_argument("demand rate must be >= 0");
        if (d.rate == 0.0) continue;
        rates[{d.requester, d.content}] += d.rate;
    }
    std::vector<RequestClass> out;
    std::map<NodeId, ShortestPathTree> trees;
    for (const auto& [key, rate] : rates) {
        auto [requester, content] = key;
        if (net.is_source(requester, content)) continue;
        auto it = trees.find(requester);
        if (it == trees.end())
            it = trees.emplace(requester, shortest_path_tree(net, requester)).first;
        RequestClass rc;
        rc.content = content;
        rc.path = route(net, it->second, content);
        rc.rate = rate;
        out.push_back(std::move(rc));
    }
    return out;
}

}  // namespace cachenet
