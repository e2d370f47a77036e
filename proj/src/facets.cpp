#include "mmt/facets.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace mmt {

namespace {

std::vector<std::vector<int>> close_under_subsets(std::set<std::vector<int>> simplices) {
    // add every nonempty subset; facets suffice by induction
    std::vector<std::vector<int>> queue(simplices.begin(), simplices.end());
    while (!queue.empty()) {
        std::vector<int> s = std::move(queue.back());
        queue.pop_back();
        if (s.size() <= 1) continue;
        for (size_t omit = 0; omit < s.size(); ++omit) {
            std::vector<int> f;
            f.reserve(s.size() - 1);
            for (size_t i = 0; i < s.size(); ++i)
                if (i != omit) f.push_back(s[i]);
            if (simplices.insert(f).second) queue.push_back(std::move(f));
        }
    }
    std::vector<std::vector<int>> out(simplices.begin(), simplices.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::pair(a.size(), a) < std::pair(b.size(), b);
    });
    return out;
}

std::string label_of_n(int i) {
    if (i < 26) return std::string(1, static_cast<char>('a' + i));
    return "v" + std::to_string(i + 1);
}

} // namespace

SimplicialComplex::SimplicialComplex(std::vector<std::string> vertex_labels,
                                     std::vector<std::vector<std::string>> simplices) {
    std::sort(vertex_labels.begin(), vertex_labels.end());
    if (std::adjacent_find(vertex_labels.begin(), vertex_labels.end()) != vertex_labels.end())
        throw ValidationError("duplicate vertex label");
    vertex_labels_ = std::move(vertex_labels);

    std::map<std::string, int> id;
    for (int i = 0; i < vertex_count(); ++i) id[vertex_labels_[i]] = i;

    std::set<std::vector<int>> sset;
    for (int i = 0; i < vertex_count(); ++i) sset.insert({i});
    for (const auto& simplex : simplices) {
        if (simplex.empty()) throw ValidationError("empty simplex");
        std::vector<int> ids;
        for (const std::string& label : simplex) {
            auto it = id.find(label);
            if (it == id.end()) throw ValidationError("simplex uses undeclared vertex '" + label + "'");
            ids.push_back(it->second);
        }
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
            throw ValidationError("simplex with repeated vertex");
        sset.insert(std::move(ids));
    }
    strata_ = close_under_subsets(std::move(sset));
}

std::string SimplicialComplex::stratum_key(int s) const {
    std::string key;
    for (int v : strata_[s]) {
        if (!key.empty()) key += '|';
        key += vertex_labels_[v];
    }
    return key;
}

std::optional<int> SimplicialComplex::stratum_by_vertices(std::vector<int> verts) const {
    std::sort(verts.begin(), verts.end());
    auto it = std::lower_bound(strata_.begin(), strata_.end(), verts, [](const auto& a, const auto& b) {
        return std::pair(a.size(), a) < std::pair(b.size(), b);
    });
    if (it != strata_.end() && *it == verts) return static_cast<int>(it - strata_.begin());
    return std::nullopt;
}

std::optional<int> SimplicialComplex::stratum_by_key(const std::string& key) const {
    std::vector<int> verts;
    std::string cur;
    for (size_t i = 0; i <= key.size(); ++i) {
        if (i == key.size() || key[i] == '|') {
            auto v = vertex_id(cur);
            if (!v) return std::nullopt;
            verts.push_back(*v);
            cur.clear();
        } else {
            cur += key[i];
        }
    }
    return stratum_by_vertices(std::move(verts));
}

std::optional<int> SimplicialComplex::vertex_id(const std::string& label) const {
    auto it = std::lower_bound(vertex_labels_.begin(), vertex_labels_.end(), label);
    if (it != vertex_labels_.end() && *it == label) return static_cast<int>(it - vertex_labels_.begin());
    return std::nullopt;
}

int SimplicialComplex::vertex_stratum(int vertex) const {
    auto s = stratum_by_vertices({vertex});
    if (!s) throw ValidationError("vertex out of range");
    return *s;
}

FacePoset::FacePoset(SimplicialComplex complex) : complex_(std::move(complex)) {
    const int n = complex_.stratum_count();
    stars_.resize(n);
    faces_.resize(n);
    cofacets_.resize(n);
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t)
            if (leq(s, t)) {
                stars_[s].push_back(t);
                faces_[t].push_back(s);
                if (complex_.dim(t) == complex_.dim(s) + 1) cofacets_[s].push_back(t);
            }
}

bool FacePoset::leq(int s, int t) const {
    const auto& a = complex_.stratum(s);
    const auto& b = complex_.stratum(t);
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<int> FacePoset::maximal_strata() const {
    std::vector<int> out;
    for (int s = 0; s < size(); ++s)
        if (stars_[s].size() == 1) out.push_back(s);
    return out;
}

PosetPtr make_poset(SimplicialComplex complex) {
    return std::make_shared<const FacePoset>(std::move(complex));
}

bool is_up_closed(const FacePoset& poset, const std::vector<int>& strata) {
    std::set<int> in(strata.begin(), strata.end());
    for (int s : strata)
        for (int t : poset.cofacets(s))
            if (!in.count(t)) return false;
    return true;
}

ConstructibleOpen::ConstructibleOpen(PosetPtr poset, std::vector<int> strata)
    : poset_(std::move(poset)), strata_(std::move(strata)) {
    std::sort(strata_.begin(), strata_.end());
    strata_.erase(std::unique(strata_.begin(), strata_.end()), strata_.end());
    for (int s : strata_)
        if (s < 0 || s >= poset_->size()) throw ValidationError("stratum index out of range");
    for (int s : strata_)
        for (int t : poset_->cofacets(s))
            if (!std::binary_search(strata_.begin(), strata_.end(), t))
                throw ValidationError("set is not up-closed: stratum '" +
                                      poset_->complex().stratum_key(s) + "' lacks coface '" +
                                      poset_->complex().stratum_key(t) + "'");
}

ConstructibleOpen ConstructibleOpen::star_of(const PosetPtr& poset, int s) {
    return ConstructibleOpen(poset, poset->star(s));
}

ConstructibleOpen ConstructibleOpen::whole(const PosetPtr& poset) {
    std::vector<int> all(poset->size());
    for (int i = 0; i < poset->size(); ++i) all[i] = i;
    return ConstructibleOpen(poset, std::move(all));
}

ConstructibleOpen ConstructibleOpen::empty(const PosetPtr& poset) {
    return ConstructibleOpen(poset, {});
}

bool ConstructibleOpen::contains(int s) const {
    return std::binary_search(strata_.begin(), strata_.end(), s);
}

bool ConstructibleOpen::subset_of(const ConstructibleOpen& other) const {
    return std::includes(other.strata_.begin(), other.strata_.end(), strata_.begin(), strata_.end());
}

ConstructibleOpen ConstructibleOpen::intersect(const ConstructibleOpen& other) const {
    std::vector<int> out;
    std::set_intersection(strata_.begin(), strata_.end(), other.strata_.begin(), other.strata_.end(),
                          std::back_inserter(out));
    return ConstructibleOpen(poset_, std::move(out));
}

void validate_refinement(const RefinementMap& r) {
    if (!r.source || !r.target) throw ValidationError("refinement map missing posets");
    if (static_cast<int>(r.image.size()) != r.source->size())
        throw ValidationError("refinement map image size mismatch");
    std::vector<char> hit(r.target->size(), 0);
    for (int s = 0; s < r.source->size(); ++s) {
        if (r.image[s] < 0 || r.image[s] >= r.target->size())
            throw ValidationError("refinement image out of range");
        hit[r.image[s]] = 1;
    }
    for (int t = 0; t < r.target->size(); ++t)
        if (!hit[t])
            throw ValidationError("refinement map not surjective: misses '" +
                                  r.target->complex().stratum_key(t) + "'");
    for (int s = 0; s < r.source->size(); ++s)
        for (int t : r.source->cofacets(s))
            if (!r.target->leq(r.image[s], r.image[t]))
                throw ValidationError("refinement map not monotone at '" +
                                      r.source->complex().stratum_key(s) + "' < '" +
                                      r.source->complex().stratum_key(t) + "'");
}

RefinementMap compose(const RefinementMap& second, const RefinementMap& first) {
    if (first.target.get() != second.source.get())
        throw ValidationError("refinement maps do not compose");
    std::vector<int> image(first.source->size());
    for (int s = 0; s < first.source->size(); ++s) image[s] = second.image[first.image[s]];
    return RefinementMap{first.source, second.target, std::move(image)};
}

ConstructibleOpen pullback_open(const RefinementMap& r, const ConstructibleOpen& u) {
    if (u.poset().get() != r.target.get()) throw ValidationError("pullback_open poset mismatch");
    std::vector<int> pre;
    for (int s = 0; s < r.source->size(); ++s)
        if (u.contains(r.image[s])) pre.push_back(s);
    return ConstructibleOpen(r.source, std::move(pre));
}

SimplicialComplex standard_complex(StandardKind kind, int n) {
    std::vector<std::string> labels;
    std::vector<std::vector<std::string>> simplices;
    switch (kind) {
    case StandardKind::path: {
        if (n < 1) throw ValidationError("path needs n >= 1 vertices");
        for (int i = 0; i < n; ++i) labels.push_back(label_of_n(i));
        for (int i = 0; i + 1 < n; ++i) simplices.push_back({labels[i], labels[i + 1]});
        break;
    }
    case StandardKind::circle: {
        if (n < 3) throw ValidationError("circle needs n >= 3 vertices");
        for (int i = 0; i < n; ++i) labels.push_back(label_of_n(i));
        for (int i = 0; i < n; ++i) simplices.push_back({labels[i], labels[(i + 1) % n]});
        break;
    }
    case StandardKind::simplex: {
        if (n < 0 || n > 12) throw ValidationError("simplex dimension out of range");
        for (int i = 0; i <= n; ++i) labels.push_back(label_of_n(i));
        simplices.push_back(labels);
        break;
    }
    case StandardKind::sphere_boundary: {
        if (n < 0 || n > 12) throw ValidationError("sphere dimension out of range");
        for (int i = 0; i <= n + 1; ++i) labels.push_back(label_of_n(i));
        for (size_t omit = 0; omit < labels.size(); ++omit) {
            std::vector<std::string> facet;
            for (size_t i = 0; i < labels.size(); ++i)
                if (i != omit) facet.push_back(labels[i]);
            simplices.push_back(std::move(facet));
        }
        break;
    }
    }
    return SimplicialComplex(std::move(labels), std::move(simplices));
}

Manifold1D::Manifold1D(PosetPtr poset, std::vector<int> vertex_order, bool circle)
    : poset_(std::move(poset)), order_(std::move(vertex_order)), circle_(circle) {
    const SimplicialComplex& k = poset_->complex();
    int edges = 0;
    for (int s = 0; s < k.stratum_count(); ++s) {
        if (k.dim(s) > 1) throw ValidationError("not a 1-manifold: has a simplex of dimension > 1");
        if (k.dim(s) == 1) ++edges;
    }
    if (static_cast<int>(order_.size()) != k.vertex_count())
        throw ValidationError("vertex order must list every vertex once");
    int expected_edges = circle_ ? k.vertex_count() : k.vertex_count() - 1;
    if (edges != expected_edges) throw ValidationError("edge count does not match a 1-manifold of this kind");
    const int n = static_cast<int>(order_.size());
    int pairs = circle_ ? n : n - 1;
    for (int i = 0; i < pairs; ++i) {
        int u = order_[i], v = order_[(i + 1) % n];
        if (!k.stratum_by_vertices({u, v}))
            throw ValidationError("vertex order not connected by edges");
    }
}

Manifold1D Manifold1D::from_complex(PosetPtr poset) {
    const SimplicialComplex& k = poset->complex();
    const int nv = k.vertex_count();
    if (nv == 0) throw ValidationError("empty complex");
    std::vector<std::vector<int>> nbr(nv);
    for (int s = 0; s < k.stratum_count(); ++s) {
        if (k.dim(s) > 1) throw ValidationError("not a 1-manifold");
        if (k.dim(s) == 1) {
            int u = k.stratum(s)[0], v = k.stratum(s)[1];
            nbr[u].push_back(v);
            nbr[v].push_back(u);
        }
    }
    std::vector<int> ends;
    for (int v = 0; v < nv; ++v) {
        if (nbr[v].size() > 2) throw ValidationError("vertex '" + k.vertex_labels()[v] + "' lies in more than 2 edges");
        if (nbr[v].size() <= 1) ends.push_back(v);
    }
    bool circle = ends.empty();
    int start;
    if (circle) {
        start = 0; // labels are sorted, so vertex 0 is lexicographically least
    } else {
        if (ends.size() != 2 && !(nv == 1 && ends.size() == 1))
            throw ValidationError("not a connected 1-manifold");
        start = ends.front();
    }
    std::vector<int> order{start};
    std::vector<char> seen(nv, 0);
    seen[start] = 1;
    if (nv > 1) {
        int cur = start;
        if (circle && nbr[start].size() == 2) {
            // walk toward the lexicographically smaller neighbor
            int a = nbr[start][0], b = nbr[start][1];
            cur = (k.vertex_labels()[a] < k.vertex_labels()[b]) ? a : b;
        } else {
            cur = nbr[start][0];
        }
        order.push_back(cur);
        seen[cur] = 1;
        while (static_cast<int>(order.size()) < nv) {
            int nxt = -1;
            for (int w : nbr[order.back()])
                if (!seen[w]) nxt = w;
            if (nxt < 0) throw ValidationError("1-manifold is not connected");
            order.push_back(nxt);
            seen[nxt] = 1;
        }
    }
    return Manifold1D(std::move(poset), std::move(order), circle);
}

int Manifold1D::position_of(int vertex) const {
    for (int i = 0; i < static_cast<int>(order_.size()); ++i)
        if (order_[i] == vertex) return i;
    throw ValidationError("vertex not in manifold");
}

std::optional<int> Manifold1D::next_vertex(int vertex) const {
    int p = position_of(vertex);
    if (p + 1 < static_cast<int>(order_.size())) return order_[p + 1];
    if (circle_) return order_[0];
    return std::nullopt;
}

std::optional<int> Manifold1D::prev_vertex(int vertex) const {
    int p = position_of(vertex);
    if (p > 0) return order_[p - 1];
    if (circle_) return order_.back();
    return std::nullopt;
}

int Manifold1D::edge_between(int u, int v) const {
    auto s = complex().stratum_by_vertices({u, v});
    if (!s) throw ValidationError("no edge between the given vertices");
    return *s;
}

std::vector<int> Manifold1D::strata_in_order() const {
    std::vector<int> out;
    const int n = vertex_count();
    for (int i = 0; i < n; ++i) {
        out.push_back(complex().vertex_stratum(order_[i]));
        if (i + 1 < n || circle_) out.push_back(edge_between(order_[i], order_[(i + 1) % n]));
    }
    if (n == 1) return out; // single-vertex path
    return out;
}

std::vector<ConormalPoint> conormal_points(const Manifold1D& m) {
    std::vector<ConormalPoint> out;
    const auto& order = m.vertex_order();
    for (size_t i = 0; i < order.size(); ++i) {
        bool drop_plus = !m.is_circle() && i + 1 == order.size();
        bool drop_minus = !m.is_circle() && i == 0;
        if (!drop_plus) out.push_back({order[i], Sign::plus});
        if (!drop_minus) out.push_back({order[i], Sign::minus});
    }
    return out;
}

bool is_conormal_point(const Manifold1D& m, ConormalPoint p) {
    if (p.vertex < 0 || p.vertex >= m.complex().vertex_count()) return false;
    if (m.is_circle()) return true;
    if (p.vertex == m.vertex_order().front() && p.sign == Sign::minus) return false;
    if (p.vertex == m.vertex_order().back() && p.sign == Sign::plus) return false;
    return true;
}

Subdivision subdivide_1d(const Manifold1D& m) {
    const SimplicialComplex& k = m.complex();
    std::vector<std::string> labels = k.vertex_labels();
    auto midpoint_label = [&](int u, int v) {
        std::string a = k.vertex_labels()[u], b = k.vertex_labels()[v];
        if (b < a) std::swap(a, b);
        return "(" + a + "." + b + ")";
    };

    const int n = m.vertex_count();
    const int pairs = m.is_circle() ? n : n - 1;
    std::vector<std::vector<std::string>> simplices;
    std::vector<std::string> new_order_labels;
    std::map<std::string, int> mid_to_edge; // midpoint label -> old edge stratum
    for (int i = 0; i < n; ++i) {
        int u = m.vertex_order()[i];
        new_order_labels.push_back(k.vertex_labels()[u]);
        if (i < pairs) {
            int v = m.vertex_order()[(i + 1) % n];
            std::string mid = midpoint_label(u, v);
            mid_to_edge[mid] = m.edge_between(u, v);
            labels.push_back(mid);
            simplices.push_back({k.vertex_labels()[u], mid});
            simplices.push_back({mid, k.vertex_labels()[v]});
            new_order_labels.push_back(mid);
        }
    }
    PosetPtr refined_poset = make_poset(SimplicialComplex(labels, simplices));
    const SimplicialComplex& rk = refined_poset->complex();

    std::vector<int> order_ids;
    for (const std::string& label : new_order_labels) order_ids.push_back(*rk.vertex_id(label));
    Manifold1D refined(refined_poset, order_ids, m.is_circle());

    // refinement map: old vertices to themselves, midpoints and half-edges to
    // the subdivided edge
    std::vector<int> image(refined_poset->size(), -1);
    for (int s = 0; s < refined_poset->size(); ++s) {
        int containing_edge = -1;
        int old_vertex = -1;
        for (int v : rk.stratum(s)) {
            const std::string& label = rk.vertex_labels()[v];
            if (auto mid = mid_to_edge.find(label); mid != mid_to_edge.end()) {
                containing_edge = mid->second;
            } else {
                old_vertex = *k.vertex_id(label);
            }
        }
        image[s] = containing_edge >= 0 ? containing_edge : k.vertex_stratum(old_vertex);
    }
    RefinementMap map{refined_poset, m.poset(), std::move(image)};
    validate_refinement(map);
    return Subdivision{std::move(refined), std::move(map)};
}

} // namespace mmt
