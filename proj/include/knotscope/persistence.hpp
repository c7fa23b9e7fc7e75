#pragma once

// Vietoris-Rips persistent homology over Z/2 in dimensions 0 and 1.
//
// Dimension 0 is a union-find pass over edges sorted by length. Dimension 1
// uses the persistent cohomology reduction: positive edges are processed in
// decreasing filtration order, coboundary columns are merged lazily from
// per-edge cofacet streams backed by the distance matrix, and apparent pairs
// are skipped without ever materializing their columns. Since a Rips complex
// becomes a cone once the scale reaches the enclosing radius
// min_i max_j d(i,j), the filtration is truncated there; this changes no
// reported bar.
//
// Filtration order is by (diameter, vertex indices): edges compare by
// (diam, i, j) with i < j, triangles by (diam, sorted vertex triple).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "common.hpp"
#include "knot.hpp"
#include "vec3.hpp"

namespace knotscope {

struct DistanceMatrix {
    std::size_t n = 0;
    std::vector<double> d;  // row-major n*n, symmetric, zero diagonal

    double operator()(std::size_t i, std::size_t j) const { return d[i * n + j]; }
    const double* row(std::size_t i) const { return d.data() + i * n; }

    static DistanceMatrix from_points(std::span<const Vec3> pts) {
        DistanceMatrix dm;
        dm.n = pts.size();
        if (dm.n == 0) throw DataError("cannot build distance matrix from empty point set");
        dm.d.assign(dm.n * dm.n, 0.0);
        for (std::size_t i = 0; i < dm.n; ++i) {
            for (std::size_t j = i + 1; j < dm.n; ++j) {
                const double v = dist(pts[i], pts[j]);
                dm.d[i * dm.n + j] = v;
                dm.d[j * dm.n + i] = v;
            }
        }
        return dm;
    }

    double max_entry() const {
        double m = 0.0;
        for (double v : d) m = std::max(m, v);
        return m;
    }

    // min over i of max over j of d(i,j); the complex is contractible past this.
    double enclosing_radius() const {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            double rowmax = 0.0;
            const double* r = row(i);
            for (std::size_t j = 0; j < n; ++j) rowmax = std::max(rowmax, r[j]);
            best = std::min(best, rowmax);
        }
        return best;
    }
};

struct Bar {
    double birth = 0.0;
    double death = std::numeric_limits<double>::infinity();
};

struct Barcode {
    std::vector<Bar> dim0;
    std::vector<Bar> dim1;
};

namespace detail {

struct UnionFind {
    std::vector<std::uint32_t> parent;
    std::vector<std::uint8_t> rnk;

    explicit UnionFind(std::size_t n) : parent(n), rnk(n, 0) {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (rnk[a] < rnk[b]) std::swap(a, b);
        parent[b] = a;
        if (rnk[a] == rnk[b]) ++rnk[a];
        return true;
    }
};

inline bool edge_less(double d1, std::uint32_t i1, std::uint32_t j1,
                      double d2, std::uint32_t i2, std::uint32_t j2) {
    if (d1 != d2) return d1 < d2;
    if (i1 != i2) return i1 < i2;
    return j1 < j2;
}

// Triangles are keyed by their sorted vertex triple packed into 64 bits, so
// lexicographic key order matches the index tie-break of the filtration.
inline std::uint64_t tri_key(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 42) |
           (static_cast<std::uint64_t>(b) << 21) | c;
}

inline void tri_unpack(std::uint64_t key, std::uint32_t& a, std::uint32_t& b,
                       std::uint32_t& c) {
    constexpr std::uint64_t mask = (1u << 21) - 1;
    c = static_cast<std::uint32_t>(key & mask);
    b = static_cast<std::uint32_t>((key >> 21) & mask);
    a = static_cast<std::uint32_t>(key >> 42);
}

struct ColEntry {
    double diam;
    std::uint64_t key;
};

struct HeapEnt {
    ColEntry e;
    std::uint32_t sid;  // stream the entry came from
};

// Min-heap on (diam, key): the top is the oldest triangle in the column.
struct HeapEntGreater {
    bool operator()(const HeapEnt& a, const HeapEnt& b) const {
        if (a.e.diam != b.e.diam) return a.e.diam > b.e.diam;
        return a.e.key > b.e.key;
    }
};

class RipsReducer {
  public:
    RipsReducer(const DistanceMatrix& dm, double threshold)
        : dm_(dm), n_(dm.n), t_(threshold) {}

    void run(Barcode& bc, std::vector<Bar>* dim1_out) {
        struct Edge {
            double diam;
            std::uint32_t i, j;
        };
        std::vector<Edge> edges;
        for (std::uint32_t i = 0; i < n_; ++i) {
            const double* row = dm_.row(i);
            for (std::uint32_t j = i + 1; j < n_; ++j) {
                if (row[j] <= t_) edges.push_back({row[j], i, j});
            }
        }
        std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
            return edge_less(a.diam, a.i, a.j, b.diam, b.i, b.j);
        });

        UnionFind uf(n_);
        std::vector<std::uint8_t> spanning(edges.size(), 0);
        for (std::size_t idx = 0; idx < edges.size(); ++idx) {
            const Edge& e = edges[idx];
            if (uf.unite(e.i, e.j)) {
                spanning[idx] = 1;
                bc.dim0.push_back({0.0, e.diam});
            }
        }
        for (std::uint32_t i = 0; i < n_; ++i) {
            if (uf.find(i) == i) bc.dim0.push_back({0.0, std::numeric_limits<double>::infinity()});
        }

        if (!dim1_out || n_ < 3) return;
        std::vector<Bar>& out = *dim1_out;
        build_neighbor_lists();

        // Positive (non-spanning) edges in decreasing filtration order.
        for (std::size_t r = edges.size(); r-- > 0;) {
            if (spanning[r]) continue;
            reduce_edge(edges[r].diam, edges[r].i, edges[r].j, out);
        }
        std::sort(out.begin(), out.end(), [](const Bar& a, const Bar& b) {
            if (a.birth != b.birth) return a.birth < b.birth;
            return a.death < b.death;
        });
    }

  private:
    struct EdgeSimplex {
        double diam;
        std::uint32_t i, j;
    };

    // A finished column is kept in factored form: the coboundary of its own
    // edge plus the coboundaries of the edges in `rest`. Re-expanding on
    // demand is far cheaper than storing the accumulated triangle entries,
    // which grow very large on structured inputs.
    struct StoredColumn {
        EdgeSimplex edge;
        std::vector<EdgeSimplex> rest;
    };

    // Yields the cofacets of one edge in (diameter, key) order, on demand.
    // Cofacets sharing the edge diameter come first, in vertex order, via a
    // plain cursor over the vertex range. The remainder is merged from the
    // two distance-sorted vertex lists: a cofacet surfaces when the larger of
    // its two legs is reached, and entries with equal diameter are buffered
    // so the group can be handed out in key order. Keeping the enumeration
    // lazy is what makes long reduction chains affordable; entries past the
    // pivot that finishes a column are never produced at all.
    struct Stream {
        double d = 0.0;
        std::uint32_t p = 0, q = 0;
        std::uint32_t k = 0;         // cursor for same-diameter cofacets
        std::size_t ip = 0, iq = 0;  // cursors into the sorted vertex lists
        bool positioned = false;
        std::vector<ColEntry> buf;   // pending equal-diameter group
        std::uint32_t bpos = 0;
    };

    const DistanceMatrix& dm_;
    std::size_t n_;
    double t_;

    std::vector<std::pair<double, std::uint32_t>> nbr_;
    std::vector<std::size_t> nbr_off_;
    std::vector<Stream> streams_;
    std::uint32_t scount_ = 0;
    std::vector<HeapEnt> sheap_;
    std::vector<EdgeSimplex> vwork_;
    std::unordered_map<std::uint64_t, std::uint32_t> pivot_owner_;
    std::vector<StoredColumn> stored_;
    HeapEntGreater gt_;

    void build_neighbor_lists() {
        nbr_.clear();
        nbr_off_.assign(n_ + 1, 0);
        for (std::uint32_t i = 0; i < n_; ++i) {
            nbr_off_[i] = nbr_.size();
            const double* r = dm_.row(i);
            for (std::uint32_t j = 0; j < n_; ++j) {
                if (j != i && r[j] <= t_) nbr_.push_back({r[j], j});
            }
            std::sort(nbr_.begin() + static_cast<std::ptrdiff_t>(nbr_off_[i]), nbr_.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
        }
        nbr_off_[n_] = nbr_.size();
    }

    bool stream_next(Stream& s, ColEntry& out) {
        if (s.bpos < s.buf.size()) {
            out = s.buf[s.bpos++];
            return true;
        }
        const double* rp = dm_.row(s.p);
        const double* rq = dm_.row(s.q);
        while (s.k < n_) {
            const std::uint32_t k = s.k++;
            if (k == s.p || k == s.q) continue;
            if (rp[k] > s.d || rq[k] > s.d) continue;
            out = {s.d, tri_key(s.p, s.q, k)};
            return true;
        }
        if (!s.positioned) {
            s.positioned = true;
            const auto cmp = [](double v, const std::pair<double, std::uint32_t>& e) {
                return v < e.first;
            };
            s.ip = static_cast<std::size_t>(
                std::upper_bound(nbr_.begin() + static_cast<std::ptrdiff_t>(nbr_off_[s.p]),
                                 nbr_.begin() + static_cast<std::ptrdiff_t>(nbr_off_[s.p + 1]),
                                 s.d, cmp) -
                nbr_.begin());
            s.iq = static_cast<std::size_t>(
                std::upper_bound(nbr_.begin() + static_cast<std::ptrdiff_t>(nbr_off_[s.q]),
                                 nbr_.begin() + static_cast<std::ptrdiff_t>(nbr_off_[s.q + 1]),
                                 s.d, cmp) -
                nbr_.begin());
        }
        const std::size_t ep = nbr_off_[s.p + 1], eq = nbr_off_[s.q + 1];
        for (;;) {
            constexpr double inf = std::numeric_limits<double>::infinity();
            const double cp = s.ip < ep ? nbr_[s.ip].first : inf;
            const double cq = s.iq < eq ? nbr_[s.iq].first : inf;
            const double c = std::min(cp, cq);
            if (c == inf) return false;
            s.buf.clear();
            s.bpos = 0;
            while (s.ip < ep && nbr_[s.ip].first == c) {
                const std::uint32_t k = nbr_[s.ip++].second;
                if (k == s.q) continue;
                const double o = rq[k];
                if (o > c) continue;  // surfaces later from the other list
                s.buf.push_back({c, tri_key(s.p, s.q, k)});
            }
            while (s.iq < eq && nbr_[s.iq].first == c) {
                const std::uint32_t k = nbr_[s.iq++].second;
                if (k == s.p) continue;
                const double o = rp[k];
                if (o >= c) continue;  // equal legs were emitted above
                s.buf.push_back({c, tri_key(s.p, s.q, k)});
            }
            if (!s.buf.empty()) {
                if (s.buf.size() > 1) {
                    std::sort(s.buf.begin(), s.buf.end(),
                              [](const ColEntry& a, const ColEntry& b) { return a.key < b.key; });
                }
                out = s.buf[s.bpos++];
                return true;
            }
        }
    }

    // Streams are pooled and reset in place so their group buffers keep
    // their capacity across columns.
    std::uint32_t new_stream(double d, std::uint32_t i, std::uint32_t j) {
        if (scount_ == streams_.size()) streams_.push_back({});
        Stream& s = streams_[scount_];
        s.d = d;
        s.p = i;
        s.q = j;
        s.k = 0;
        s.ip = s.iq = 0;
        s.positioned = false;
        s.buf.clear();
        s.bpos = 0;
        return scount_++;
    }

    // A one-entry stream; used to cancel a popped pivot against the same
    // entry inside a re-added stored column.
    std::uint32_t new_singleton(const ColEntry& e) {
        if (scount_ == streams_.size()) streams_.push_back({});
        Stream& s = streams_[scount_];
        s.d = 0.0;
        s.p = s.q = 0;
        s.k = static_cast<std::uint32_t>(n_);
        s.positioned = true;
        s.ip = s.iq = nbr_.size();
        s.buf.clear();
        s.buf.push_back(e);
        s.bpos = 0;
        return scount_++;
    }

    // Four-way min-heap: pops dominate the reduction, and the flatter layout
    // roughly halves the sift-down depth of the binary version.
    void heap_push(const HeapEnt& e) {
        sheap_.push_back(e);
        std::size_t c = sheap_.size() - 1;
        while (c > 0) {
            const std::size_t p = (c - 1) >> 2;
            if (!gt_(sheap_[p], sheap_[c])) break;
            std::swap(sheap_[p], sheap_[c]);
            c = p;
        }
    }
    HeapEnt heap_pop() {
        HeapEnt top = sheap_[0];
        const HeapEnt last = sheap_.back();
        sheap_.pop_back();
        const std::size_t n = sheap_.size();
        if (n > 0) {
            std::size_t i = 0;
            for (;;) {
                const std::size_t c0 = 4 * i + 1;
                if (c0 >= n) break;
                std::size_t m = c0;
                const std::size_t ce = c0 + 4 < n ? c0 + 4 : n;
                for (std::size_t c = c0 + 1; c < ce; ++c) {
                    if (gt_(sheap_[m], sheap_[c])) m = c;
                }
                if (!gt_(last, sheap_[m])) break;
                sheap_[i] = sheap_[m];
                i = m;
            }
            sheap_[i] = last;
        }
        return top;
    }
    void push_stream_head(std::uint32_t sid) {
        ColEntry h;
        if (stream_next(streams_[sid], h)) heap_push({h, sid});
    }
    // Pops the oldest entry surviving mod-2 cancellation, advancing the
    // source stream of every consumed copy.
    std::optional<ColEntry> pop_pivot() {
        while (!sheap_.empty()) {
            HeapEnt t = heap_pop();
            push_stream_head(t.sid);
            if (!sheap_.empty() && sheap_.front().e.key == t.e.key) {
                HeapEnt u = heap_pop();
                push_stream_head(u.sid);
                continue;
            }
            return t.e;
        }
        return std::nullopt;
    }

    // True if edge (i,j) precedes both (min(i,k),max(i,k)) and
    // (min(j,k),max(j,k)) in reverse filtration order, i.e. the edge is the
    // youngest facet of triangle (i,j,k).
    bool edge_is_youngest_facet(double d, std::uint32_t i, std::uint32_t j,
                                std::uint32_t k, double dik, double djk) const {
        const std::uint32_t i1 = std::min(i, k), j1 = std::max(i, k);
        const std::uint32_t i2 = std::min(j, k), j2 = std::max(j, k);
        return edge_less(dik, i1, j1, d, i, j) && edge_less(djk, i2, j2, d, i, j);
    }

    // Oldest cofacet of edge (p,q); nullopt when the edge has none below the
    // threshold. The first triangle matching the edge diameter can be returned
    // immediately: scanning k in ascending order visits triangle keys in
    // ascending lexicographic order.
    std::optional<ColEntry> oldest_cofacet(double dpq, std::uint32_t p,
                                           std::uint32_t q) const {
        const double* rp = dm_.row(p);
        const double* rq = dm_.row(q);
        std::optional<ColEntry> best;
        for (std::uint32_t k = 0; k < n_; ++k) {
            if (k == p || k == q) continue;
            const double a = rp[k];
            if (a > t_) continue;
            const double b = rq[k];
            if (b > t_) continue;
            const double dt = std::max({dpq, a, b});
            if (dt == dpq) return ColEntry{dt, tri_key(p, q, k)};
            if (!best || dt < best->diam ||
                (dt == best->diam && tri_key(p, q, k) < best->key)) {
                best = ColEntry{dt, tri_key(p, q, k)};
            }
        }
        return best;
    }

    EdgeSimplex youngest_facet(std::uint64_t key) const {
        std::uint32_t x, y, z;
        tri_unpack(key, x, y, z);
        EdgeSimplex f{dm_(x, y), x, y};
        const double dxz = dm_(x, z), dyz = dm_(y, z);
        if (edge_less(f.diam, f.i, f.j, dxz, x, z)) f = {dxz, x, z};
        if (edge_less(f.diam, f.i, f.j, dyz, y, z)) f = {dyz, y, z};
        return f;
    }

    // True if the triangle is the oldest cofacet of its own youngest facet,
    // with that facet being some edge other than (i,j). Such a triangle is
    // spoken for even though no column was ever stored under it.
    bool claimed_by_apparent_pair(std::uint64_t key, std::uint32_t i,
                                  std::uint32_t j) const {
        const EdgeSimplex f = youngest_facet(key);
        if (f.i == i && f.j == j) return false;
        std::optional<ColEntry> oc = oldest_cofacet(f.diam, f.i, f.j);
        return oc && oc->key == key;
    }

    void reduce_edge(double d, std::uint32_t i, std::uint32_t j, std::vector<Bar>& out) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        sheap_.clear();
        scount_ = 0;
        vwork_.clear();

        // The first cofacet sharing the edge diameter is the oldest cofacet
        // overall. If this edge is that triangle's youngest facet the pair
        // dies where it is born and the whole column is skipped; other
        // reductions rebuild it on demand. Failing that, an unclaimed
        // triangle still becomes this column's pivot with no reduction work,
        // again with zero persistence.
        const std::uint32_t s0 = new_stream(d, i, j);
        ColEntry first;
        if (!stream_next(streams_[s0], first)) {
            out.push_back({d, inf});
            return;
        }
        if (first.diam == d) {
            std::uint32_t x, y, z;
            tri_unpack(first.key, x, y, z);
            const std::uint32_t k = (x != i && x != j) ? x : ((y != i && y != j) ? y : z);
            if (edge_is_youngest_facet(d, i, j, k, dm_(i, k), dm_(j, k))) return;
            if (pivot_owner_.find(first.key) == pivot_owner_.end() &&
                !claimed_by_apparent_pair(first.key, i, j)) {
                pivot_owner_.emplace(first.key, static_cast<std::uint32_t>(stored_.size()));
                stored_.push_back({{d, i, j}, {}});
                return;
            }
        }
        heap_push({first, s0});

        for (;;) {
            std::optional<ColEntry> piv = pop_pivot();
            if (!piv) {
                out.push_back({d, inf});
                return;
            }
            auto it = pivot_owner_.find(piv->key);
            if (it != pivot_owner_.end()) {
                // The singleton cancels the popped pivot against the same
                // entry of the re-added column; the prefix that column's own
                // reduction eliminated cancels itself pairwise.
                push_stream_head(new_singleton(*piv));
                const StoredColumn& sc = stored_[it->second];
                vwork_.push_back(sc.edge);
                push_stream_head(new_stream(sc.edge.diam, sc.edge.i, sc.edge.j));
                for (const EdgeSimplex& f : sc.rest) {
                    vwork_.push_back(f);
                    push_stream_head(new_stream(f.diam, f.i, f.j));
                }
                continue;
            }
            // Unclaimed pivot: if it forms an apparent pair with its youngest
            // facet (some other edge), that facet's reduced column is exactly
            // its coboundary. Its first entry is the popped pivot itself, so
            // dropping both keeps the column intact.
            const EdgeSimplex f = youngest_facet(piv->key);
            if (f.i != i || f.j != j) {
                std::optional<ColEntry> oc = oldest_cofacet(f.diam, f.i, f.j);
                if (oc && oc->key == piv->key) {
                    vwork_.push_back(f);
                    const std::uint32_t sf = new_stream(f.diam, f.i, f.j);
                    ColEntry dropped;
                    stream_next(streams_[sf], dropped);
                    push_stream_head(sf);
                    continue;
                }
            }
            // Fresh pivot: (edge, pivot) is a persistence pair. Store the
            // column factored over the edges added during reduction; entries
            // appearing an even number of times cancel over Z/2.
            if (piv->diam > d) out.push_back({d, piv->diam});
            std::sort(vwork_.begin(), vwork_.end(),
                      [](const EdgeSimplex& a, const EdgeSimplex& b) {
                          return a.i != b.i ? a.i < b.i : a.j < b.j;
                      });
            std::vector<EdgeSimplex> rest;
            for (std::size_t s = 0; s < vwork_.size();) {
                std::size_t e = s;
                while (e < vwork_.size() && vwork_[e].i == vwork_[s].i &&
                       vwork_[e].j == vwork_[s].j)
                    ++e;
                if ((e - s) & 1) rest.push_back(vwork_[s]);
                s = e;
            }
            pivot_owner_.emplace(piv->key, static_cast<std::uint32_t>(stored_.size()));
            stored_.push_back({{d, i, j}, std::move(rest)});
            return;
        }
    }
};

}  // namespace detail

// Persistence barcode of the Rips filtration of a finite metric space.
// Bars in dimension 0 all have birth 0; the death of a dim-0 bar is the edge
// length at which its component merges, with one infinite bar per component
// still separate at the threshold. Dimension 1 bars with zero persistence are
// omitted. Classes still alive at an explicit t_max get death = infinity.
inline Barcode persistence(const DistanceMatrix& dm,
                           double t_max = std::numeric_limits<double>::infinity(),
                           int max_dim = 1) {
    if (dm.n == 0) throw DataError("persistence of empty point set");
    if (dm.n > (1u << 21)) throw DataError("point set too large for triangle keys");
    const double threshold = std::min(t_max, dm.enclosing_radius());
    Barcode bc;
    detail::RipsReducer red(dm, threshold);
    red.run(bc, max_dim >= 1 ? &bc.dim1 : nullptr);
    return bc;
}

inline Barcode persistence(const PointCloud& cloud,
                           double t_max = std::numeric_limits<double>::infinity(),
                           int max_dim = 1) {
    return persistence(DistanceMatrix::from_points(cloud.points), t_max, max_dim);
}

}  // namespace knotscope
