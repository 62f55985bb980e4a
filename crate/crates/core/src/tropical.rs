//! Vertex-weighted metric graphs, their diameters, tropical Jacobians, and
//! the tropical Torelli map.

use crate::error::{Error, Result};
use crate::forms::{rescale_to_diameter_one, FlatTorus, QuadraticForm};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: i64,
    pub weight: u32,
}

/// Endpoints are indices into the vertex list.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge<T> {
    pub u: usize,
    pub v: usize,
    pub length: T,
}

impl<T> Edge<T> {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

/// Connected multigraph with loops, positive edge lengths, and genus weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMetricGraph<T> {
    vertices: Vec<Vertex>,
    edges: Vec<Edge<T>>,
}

impl<T: Scalar> WeightedMetricGraph<T> {
    /// Vertices as `(id, weight)`, edges as `(id, id, length)`.
    pub fn new(vertices: Vec<(i64, u32)>, edges: Vec<(i64, i64, T)>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        let mut ids: Vec<i64> = vertices.iter().map(|v| v.0).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("duplicate vertex id".into()));
        }
        let index = |id: i64| {
            vertices
                .iter()
                .position(|v| v.0 == id)
                .ok_or_else(|| Error::InvalidGraph(format!("edge endpoint {id} is not a vertex")))
        };
        let mut es = Vec::with_capacity(edges.len());
        for (k, (a, b, len)) in edges.into_iter().enumerate() {
            if len <= T::zero() {
                return Err(Error::InvalidGraph(format!("edge {k} has non-positive length")));
            }
            es.push(Edge {
                u: index(a)?,
                v: index(b)?,
                length: len,
            });
        }
        let g = WeightedMetricGraph {
            vertices: vertices
                .into_iter()
                .map(|(id, weight)| Vertex { id, weight })
                .collect(),
            edges: es,
        };
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    /// Two weight-0 vertices, a loop of length `l1` at the first, a loop of
    /// length `l2` at the second, joined by a bridge of length `bridge`.
    pub fn handcuff(l1: T, l2: T, bridge: T) -> Result<Self> {
        Self::new(vec![(1, 0), (2, 0)], vec![(1, 1, l1), (2, 2, l2), (1, 2, bridge)])
    }

    /// Two weight-0 vertices joined by three edges.
    pub fn theta(l1: T, l2: T, l3: T) -> Result<Self> {
        Self::new(vec![(1, 0), (2, 0)], vec![(1, 2, l1), (1, 2, l2), (1, 2, l3)])
    }

    pub fn single_loop(weight: u32, length: T) -> Result<Self> {
        Self::new(vec![(1, weight)], vec![(1, 1, length)])
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    /// Same shape, new lengths.
    pub fn with_lengths(&self, lengths: &[T]) -> Result<Self> {
        if lengths.len() != self.edges.len() {
            return Err(Error::DimensionMismatch {
                expected: self.edges.len(),
                found: lengths.len(),
            });
        }
        let vertices = self.vertices.iter().map(|v| (v.id, v.weight)).collect();
        let edges = self
            .edges
            .iter()
            .zip(lengths)
            .map(|(e, l)| (self.vertices[e.u].id, self.vertices[e.v].id, l.clone()))
            .collect();
        Self::new(vertices, edges)
    }

    pub fn scaled(&self, c: &T) -> Result<Self> {
        let lengths: Vec<T> = self.edges.iter().map(|e| e.length.clone() * c.clone()).collect();
        self.with_lengths(&lengths)
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for e in &self.edges {
                for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                    if a == x && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn first_betti(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    /// Number of edge ends at a vertex; a loop contributes two.
    pub fn valence(&self, vertex: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.u == vertex) as usize + (e.v == vertex) as usize)
            .sum()
    }

    pub fn total_weight(&self) -> u64 {
        self.vertices.iter().map(|v| v.weight as u64).sum()
    }

    /// `b₁ + Σw = g` and every weight-0 vertex has valence at least 3.
    pub fn is_stable_type(&self, g: u64) -> bool {
        let genus_ok = self.first_betti() as u64 + self.total_weight() == g;
        let valence_ok = (0..self.vertices.len())
            .all(|i| self.vertices[i].weight > 0 || self.valence(i) >= 3);
        genus_ok && valence_ok
    }

    /// The alternative genus count `v₁ + b₁ + Σw = g`, where `v₁` is the
    /// number of vertices of valence one.
    pub fn leaf_genus_condition(&self, g: u64) -> bool {
        let v1 = (0..self.vertices.len()).filter(|&i| self.valence(i) == 1).count() as u64;
        v1 + self.first_betti() as u64 + self.total_weight() == g
    }

    /// All-pairs shortest path lengths between vertices.
    fn vertex_distances(&self) -> Vec<Vec<T>> {
        let n = self.vertices.len();
        let mut d: Vec<Vec<Option<T>>> = vec![vec![None; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = Some(T::zero());
        }
        for e in &self.edges {
            if e.is_loop() {
                continue;
            }
            for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                if d[a][b].as_ref().is_none_or(|cur| e.length < *cur) {
                    d[a][b] = Some(e.length.clone());
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                let Some(dik) = d[i][k].clone() else { continue };
                for j in 0..n {
                    let Some(dkj) = d[k][j].clone() else { continue };
                    let via = dik.clone() + dkj;
                    if d[i][j].as_ref().is_none_or(|cur| via < *cur) {
                        d[i][j] = Some(via);
                    }
                }
            }
        }
        d.into_iter()
            .map(|row| row.into_iter().map(|x| x.expect("connected")).collect())
            .collect()
    }

    /// Largest distance between two points of the metric realization.
    ///
    /// For points on distinct edges `e = [a,b]` (length `L`) and `f = [c,d]`
    /// (length `M`), the farthest point of `f` from `p ∈ e` is at distance
    /// `(d(p,c) + d(p,d) + M)/2`, a concave piecewise-linear function of
    /// `p` whose maximum sits at an endpoint or a breakpoint. Two points on
    /// the same edge are at most `(L + D(a,b))/2` apart.
    pub fn diameter(&self) -> T {
        let dist = self.vertex_distances();
        let two = T::from_i64(2);
        let mut best = T::zero();
        for row in &dist {
            for v in row {
                if *v > best {
                    best = v.clone();
                }
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            let (a, b, l) = (e.u, e.v, &e.length);
            let own = (l.clone() + dist[a][b].clone()) / two.clone();
            if own > best {
                best = own;
            }
            for (j, f) in self.edges.iter().enumerate() {
                if i == j {
                    continue;
                }
                let (c, d, m) = (f.u, f.v, &f.length);
                let to = |x: &T, w: usize| -> T {
                    let via_a = x.clone() + dist[a][w].clone();
                    let via_b = l.clone() - x.clone() + dist[b][w].clone();
                    if via_a < via_b { via_a } else { via_b }
                };
                let mut xs = vec![T::zero(), l.clone()];
                for w in [c, d] {
                    let x = (l.clone() + dist[b][w].clone() - dist[a][w].clone()) / two.clone();
                    if x > T::zero() && x < *l {
                        xs.push(x);
                    }
                }
                for x in xs {
                    let val = (to(&x, c) + to(&x, d) + m.clone()) / two.clone();
                    if val > best {
                        best = val;
                    }
                }
            }
        }
        best
    }

    pub fn rescale_to_diameter_one(&self) -> Result<Self> {
        let d = self.diameter();
        if d.is_zero() {
            return Err(Error::InvalidGraph("a point cannot be rescaled to diameter 1".into()));
        }
        self.scaled(&(T::one() / d))
    }

    /// Fundamental cycles of the spanning tree chosen greedily in edge order.
    pub fn cycle_basis(&self) -> Matrix<i64> {
        let order: Vec<usize> = (0..self.edges.len()).collect();
        self.cycle_basis_for_order(&order)
    }

    /// Fundamental cycles of the spanning tree chosen greedily in the given
    /// edge order. Rows follow the non-tree edges in index order; each row
    /// traverses its edge from `u` to `v` and returns along the tree.
    pub fn cycle_basis_for_order(&self, order: &[usize]) -> Matrix<i64> {
        let n = self.vertices.len();
        let m = self.edges.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        let mut in_tree = vec![false; m];
        for &k in order {
            let e = &self.edges[k];
            let (ru, rv) = (find(&mut parent, e.u), find(&mut parent, e.v));
            if ru != rv {
                parent[ru] = rv;
                in_tree[k] = true;
            }
        }
        let rows: Vec<Vec<i64>> = (0..m)
            .filter(|&k| !in_tree[k])
            .map(|k| {
                let e = &self.edges[k];
                let mut row = vec![0i64; m];
                row[k] += 1;
                for (edge, sign) in self.tree_path(&in_tree, e.v, e.u) {
                    row[edge] += sign;
                }
                row
            })
            .collect();
        if rows.is_empty() {
            return Matrix::zeros(0, m);
        }
        Matrix::from_rows(rows).expect("rows share a length")
    }

    /// Signed tree edges on the path `from → to`.
    fn tree_path(&self, in_tree: &[bool], from: usize, to: usize) -> Vec<(usize, i64)> {
        let n = self.vertices.len();
        let mut via: Vec<Option<(usize, usize, i64)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::from([from]);
        seen[from] = true;
        while let Some(x) = queue.pop_front() {
            if x == to {
                break;
            }
            for (k, e) in self.edges.iter().enumerate() {
                if !in_tree[k] {
                    continue;
                }
                let step = if e.u == x {
                    Some((e.v, 1))
                } else if e.v == x {
                    Some((e.u, -1))
                } else {
                    None
                };
                if let Some((y, sign)) = step {
                    if !seen[y] {
                        seen[y] = true;
                        via[y] = Some((x, k, sign));
                        queue.push_back(y);
                    }
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = to;
        while cur != from {
            let (prev, k, sign) = via[cur].expect("tree spans the graph");
            path.push((k, sign));
            cur = prev;
        }
        path.reverse();
        path
    }

    pub fn tropical_jacobian(&self) -> Result<TropicalAV<T>> {
        self.tropical_jacobian_with_basis(&self.cycle_basis())
    }

    /// `gram[a][b] = Σ_e α[a][e]·α[b][e]·l(e)` for a given cycle basis `α`.
    pub fn tropical_jacobian_with_basis(&self, alpha: &Matrix<i64>) -> Result<TropicalAV<T>> {
        if self.first_betti() == 0 {
            return Err(Error::TreeGraph);
        }
        if alpha.rows() != self.first_betti() || alpha.cols() != self.edges.len() {
            return Err(Error::DimensionMismatch {
                expected: self.first_betti(),
                found: alpha.rows(),
            });
        }
        let lengths: Vec<T> = self.edges.iter().map(|e| e.length.clone()).collect();
        let a = alpha.cast::<T>();
        let gram = a.mul(&Matrix::diagonal(&lengths)).mul(&a.transpose());
        Ok(TropicalAV {
            rank: self.first_betti(),
            gram: QuadraticForm::new(gram)?,
        })
    }

    /// Diameter-1 rescale of the tropical Jacobian.
    pub fn torelli(&self, tol: f64) -> Result<FlatTorus<T>> {
        let jac = self.tropical_jacobian()?;
        rescale_to_diameter_one(&FlatTorus::new(jac.gram), tol)
    }
}

/// `H₁(Γ, ℝ)/H₁(Γ, ℤ)` with the cycle-length form.
#[derive(Debug, Clone, PartialEq)]
pub struct TropicalAV<T> {
    pub rank: usize,
    pub gram: QuadraticForm<T>,
}
