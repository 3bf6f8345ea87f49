//! Feynman diagrams with `Z/nZ`-flows.
//!
//! [`weight_flow`] evaluates the flow-weighted sum over a single copy of the
//! triangulation; [`weight_direct`] expands the ordinary weight over the
//! labels `0..nN` of the n-fold cover. The two agree exactly.
//!
//! In exact mode no root of unity is ever evaluated: each propagator entry is
//! reduced to a polynomial `g(t) mod (t^n - 1)`, flows are parametrized by the
//! free edges of a spanning tree, and the torus sum keeps the exponent-zero
//! coefficient of the product.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::circulant::BlockCirculant;
use crate::error::{Error, Result};
use crate::exactfield::serial::{parse_element, parse_rational_value, rational_to_value};
use crate::exactfield::{bits_for_digits, ComplexBall, FieldElement, NumberField, Rational};
use crate::laurent::RatMatrix;
use crate::linalg::FieldMatrix;
use crate::nz::{Curve, TwistedNZData};
use crate::rootsum::reduce_mod_cyclic;

/// A connected graph with oriented edges; multi-edges and self-loops allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeynmanDiagram {
    degrees: Vec<usize>,
    edges: Vec<(usize, usize)>,
    symmetry_factor: Rational,
}

impl FeynmanDiagram {
    pub fn new(
        degrees: Vec<usize>,
        edges: Vec<(usize, usize)>,
        symmetry_factor: Rational,
    ) -> Result<Self> {
        let v = degrees.len();
        let bad = |m: String| Err(Error::InvalidDiagram(m));
        if v == 0 {
            return bad("no vertices".into());
        }
        if symmetry_factor <= Rational::from_integer(0.into()) {
            return bad("symmetry factor must be positive".into());
        }
        let mut half = vec![0usize; v];
        for &(a, b) in &edges {
            if a >= v || b >= v {
                return bad(format!("edge ({a}, {b}) references a missing vertex"));
            }
            half[a] += 1;
            half[b] += 1;
        }
        if half != degrees {
            return bad(format!(
                "declared degrees {degrees:?} differ from incidences {half:?}"
            ));
        }
        let g = FeynmanDiagram {
            degrees,
            edges,
            symmetry_factor,
        };
        if g.bfs().0.len() != v {
            return bad("diagram is not connected".into());
        }
        Ok(g)
    }

    /// Degrees computed from the edges.
    pub fn from_edges(
        vertices: usize,
        edges: Vec<(usize, usize)>,
        symmetry_factor: Rational,
    ) -> Result<Self> {
        let mut deg = vec![0usize; vertices];
        for &(a, b) in &edges {
            if a >= vertices || b >= vertices {
                return Err(Error::InvalidDiagram(format!(
                    "edge ({a}, {b}) references a missing vertex"
                )));
            }
            deg[a] += 1;
            deg[b] += 1;
        }
        Self::new(deg, edges, symmetry_factor)
    }

    pub fn vertex_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn symmetry_factor(&self) -> &Rational {
        &self.symmetry_factor
    }

    /// `|E| - |V| + 1`.
    pub fn first_betti(&self) -> usize {
        self.edges.len() + 1 - self.degrees.len()
    }

    /// Same diagram with edge `i` reversed.
    pub fn reversed(&self, i: usize) -> Self {
        let mut g = self.clone();
        let (a, b) = g.edges[i];
        g.edges[i] = (b, a);
        g
    }

    /// BFS order from vertex 0 and the tree edge reaching each vertex.
    fn bfs(&self) -> (Vec<usize>, Vec<Option<usize>>) {
        let v = self.degrees.len();
        let mut parent = vec![None; v];
        let mut seen = vec![false; v];
        let mut order = vec![0];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for (i, &(a, b)) in self.edges.iter().enumerate() {
                let y = if a == x {
                    b
                } else if b == x {
                    a
                } else {
                    continue;
                };
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(i);
                    order.push(y);
                    queue.push_back(y);
                }
            }
        }
        (order, parent)
    }

    /// Edge values as integer combinations of the free-edge values: row `e`
    /// gives `phi(e) = sum_j M[e][j] k_j`. Free edges are the complement of a
    /// BFS spanning tree, in edge order.
    pub fn flow_basis(&self) -> Vec<Vec<i64>> {
        let (order, parent) = self.bfs();
        let tree: BTreeSet<usize> = parent.iter().flatten().copied().collect();
        let d = self.first_betti();
        let mut m: Vec<Option<Vec<i64>>> = vec![None; self.edges.len()];
        let mut j = 0;
        for (i, row) in m.iter_mut().enumerate() {
            if !tree.contains(&i) {
                let mut unit = vec![0; d];
                unit[j] = 1;
                *row = Some(unit);
                j += 1;
            }
        }
        for &v in order.iter().skip(1).rev() {
            let pe = parent[v].unwrap();
            let mut net = vec![0i64; d];
            for (i, &(a, b)) in self.edges.iter().enumerate() {
                if i == pe || a == b {
                    continue;
                }
                let sign = if b == v {
                    1
                } else if a == v {
                    -1
                } else {
                    continue;
                };
                let row = m[i].as_ref().expect("children are resolved first");
                for (x, y) in net.iter_mut().zip(row) {
                    *x += sign * y;
                }
            }
            let enters = self.edges[pe].1 == v;
            m[pe] = Some(
                net.into_iter()
                    .map(|x| if enters { -x } else { x })
                    .collect(),
            );
        }
        m.into_iter().map(Option::unwrap).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertices": self.degrees.iter().map(|d| json!({"degree": d})).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "symmetry_factor": rational_to_value(&self.symmetry_factor),
        })
    }
}

/// All `Z/nZ`-flows of a diagram.
pub struct Flows {
    basis: Vec<Vec<i64>>,
    n: u64,
    k: Vec<u64>,
    done: bool,
}

impl Iterator for Flows {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let n = self.n as i64;
        let flow = self
            .basis
            .iter()
            .map(|row| {
                let s: i64 = row.iter().zip(&self.k).map(|(a, &b)| a * b as i64).sum();
                s.rem_euclid(n) as u64
            })
            .collect();
        let mut pos = 0;
        loop {
            if pos == self.k.len() {
                self.done = true;
                break;
            }
            self.k[pos] += 1;
            if self.k[pos] < self.n {
                break;
            }
            self.k[pos] = 0;
            pos += 1;
        }
        Some(flow)
    }
}

pub fn enumerate_flows(g: &FeynmanDiagram, n: u64) -> Flows {
    assert!(n >= 1, "flows need n >= 1");
    Flows {
        basis: g.flow_basis(),
        n,
        k: vec![0; g.first_betti()],
        done: false,
    }
}

/// `Gamma^(k)_j` for each degree `k` and tetrahedron `j`, with an hbar grade per degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexFactorTable {
    factors: BTreeMap<usize, Vec<FieldElement>>,
    grades: BTreeMap<usize, i32>,
}

impl VertexFactorTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, degree: usize, values: Vec<FieldElement>, grade: i32) {
        self.factors.insert(degree, values);
        self.grades.insert(degree, grade);
    }

    pub fn get(&self, degree: usize, index: usize) -> Result<&FieldElement> {
        self.factors
            .get(&degree)
            .and_then(|v| v.get(index))
            .ok_or(Error::MissingVertexFactor { degree, index })
    }

    pub fn grade(&self, degree: usize) -> Result<i32> {
        self.grades
            .get(&degree)
            .copied()
            .ok_or(Error::MissingVertexFactor { degree, index: 0 })
    }

    /// `|E|` plus the vertex grades.
    pub fn diagram_grade(&self, g: &FeynmanDiagram) -> Result<i32> {
        let mut s = g.edges.len() as i32;
        for &d in &g.degrees {
            s += self.grade(d)?;
        }
        Ok(s)
    }

    fn check(&self, g: &FeynmanDiagram, size: usize) -> Result<()> {
        for &d in &g.degrees {
            for j in 0..size {
                self.get(d, j)?;
            }
        }
        Ok(())
    }
}

/// A value with its power of hbar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedValue {
    pub grade: i32,
    pub value: FieldElement,
}

/// `Pi(t)` together with the constant propagator `Pi_0` used on zero flow values.
#[derive(Clone, Debug)]
pub struct Propagators {
    pi_t: RatMatrix,
    pi_zero: FieldMatrix,
}

impl Propagators {
    pub fn new(pi_t: RatMatrix, pi_zero: FieldMatrix) -> Result<Self> {
        let n = pi_t.rows();
        if pi_t.cols() != n || pi_zero.rows() != n || pi_zero.cols() != n {
            return Err(Error::Dimension(
                "propagators must be square of equal size".into(),
            ));
        }
        Ok(Propagators { pi_t, pi_zero })
    }

    pub fn from_nz(data: &TwistedNZData, curve: Curve) -> Result<Self> {
        Self::new(data.propagator().clone(), data.pi_zero(curve)?)
    }

    pub fn size(&self) -> usize {
        self.pi_t.rows()
    }

    pub fn pi_t(&self) -> &RatMatrix {
        &self.pi_t
    }

    pub fn pi_zero(&self) -> &FieldMatrix {
        &self.pi_zero
    }

    pub fn field(&self) -> Arc<NumberField> {
        let f = self.pi_t.field();
        if f.is_rational() {
            self.pi_zero.field().clone()
        } else {
            f.clone()
        }
    }

    /// For each entry, `g_0..g_{n-1}` with `g(w^k) = Pi_k` at every n-th root of unity.
    fn reduced(&self, n: u64) -> Result<Vec<Vec<Vec<FieldElement>>>> {
        let size = self.size();
        let inv_n = crate::exactfield::rat(1, n as i64);
        (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| {
                        let mut g = reduce_mod_cyclic(self.pi_t.get(i, j), n)?;
                        let at_one = g.iter().fold(self.field().zero(), |a, b| &a + b);
                        let fix = (self.pi_zero.get(i, j) - &at_one).scale(&inv_n);
                        if !fix.is_zero() {
                            for c in &mut g {
                                *c = &*c + &fix;
                            }
                        }
                        Ok(g)
                    })
                    .collect()
            })
            .collect()
    }

    /// The cover propagator: block circulant with `V C V^-1 = diag(Pi_0, Pi(w), ...)`.
    pub fn cover(&self, n: u64) -> Result<BlockCirculant> {
        let g = self.reduced(n)?;
        let size = self.size();
        let field = self.field();
        let blocks = (0..n as usize)
            .map(|m| FieldMatrix::from_fn(&field, size, size, |i, j| g[i][j][m].clone()))
            .collect();
        BlockCirculant::new(blocks)
    }
}

fn for_each_labeling(
    vertices: usize,
    labels: usize,
    mut f: impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    let mut iota = vec![0usize; vertices];
    loop {
        f(&iota)?;
        let mut pos = 0;
        loop {
            if pos == vertices {
                return Ok(());
            }
            iota[pos] += 1;
            if iota[pos] < labels {
                break;
            }
            iota[pos] = 0;
            pos += 1;
        }
    }
}

fn sigma_inverse(g: &FeynmanDiagram) -> Rational {
    g.symmetry_factor.recip()
}

/// `(1/sigma) sum_iota n^(1-d) sum_phi prod_v Gamma prod_e (Pi_phi(e))_{iota(v) iota(v')}`.
pub fn weight_flow(
    g: &FeynmanDiagram,
    n: u64,
    props: &Propagators,
    gamma: &VertexFactorTable,
) -> Result<GradedValue> {
    let grade = gamma.diagram_grade(g)?;
    let size = props.size();
    gamma.check(g, size)?;
    let field = props.field();
    let reduced = props.reduced(n)?;
    let basis = g.flow_basis();
    let d = g.first_betti();
    let nn = n as usize;
    let cells = nn.pow(d as u32);
    // exponent vector of each edge, packed as an offset in the (Z/n)^d array
    let strides: Vec<usize> = (0..d).map(|j| nn.pow(j as u32)).collect();
    let shift = |x: usize, e: usize, m: usize| -> usize {
        let mut out = 0;
        for j in 0..d {
            let xj = x / strides[j] % nn;
            let step = (basis[e][j].rem_euclid(n as i64) as usize * m) % nn;
            out += (xj + step) % nn * strides[j];
        }
        out
    };
    // shift tables: target[e][m][x]
    let targets: Vec<Vec<Vec<usize>>> = (0..g.edges.len())
        .map(|e| {
            (0..nn)
                .map(|m| (0..cells).map(|x| shift(x, e, m)).collect())
                .collect()
        })
        .collect();
    let mut total = field.zero();
    for_each_labeling(g.vertex_count(), size, |iota| {
        let mut vf = field.one();
        for (v, &deg) in g.degrees.iter().enumerate() {
            vf = &vf * gamma.get(deg, iota[v])?;
        }
        if vf.is_zero() {
            return Ok(());
        }
        let mut arr = vec![field.zero(); cells];
        arr[0] = field.one();
        for (e, &(a, b)) in g.edges.iter().enumerate() {
            let gv = &reduced[iota[a]][iota[b]];
            let mut next = vec![field.zero(); cells];
            for (x, c) in arr.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (m, gm) in gv.iter().enumerate() {
                    if !gm.is_zero() {
                        let y = targets[e][m][x];
                        next[y] = &next[y] + &(c * gm);
                    }
                }
            }
            arr = next;
        }
        // torus sum is n^d times the zero coefficient; times n^(1-d)
        total = &total + &(&vf * &arr[0]);
        Ok(())
    })?;
    let value = total.scale(&(Rational::from_integer((n as i64).into()) * sigma_inverse(g)));
    Ok(GradedValue { grade, value })
}

/// The same sum with `Pi(w^k)` evaluated in ball arithmetic.
pub fn weight_flow_numeric(
    g: &FeynmanDiagram,
    n: u64,
    props: &Propagators,
    gamma: &VertexFactorTable,
    root_index: usize,
    digits: u32,
) -> Result<ComplexBall> {
    let size = props.size();
    gamma.check(g, size)?;
    let bits = bits_for_digits(digits) + 32;
    let root = props.field().root_ball(root_index, bits)?;
    let mut pis: Vec<Vec<Vec<ComplexBall>>> = Vec::with_capacity(n as usize);
    for k in 0..n {
        let w = ComplexBall::root_of_unity(k as i64, n, bits);
        pis.push(
            (0..size)
                .map(|i| {
                    (0..size)
                        .map(|j| {
                            if k == 0 {
                                Ok(props.pi_zero.get(i, j).eval_at(&root))
                            } else {
                                props
                                    .pi_t
                                    .get(i, j)
                                    .eval_ball(&root, &w)
                                    .ok_or(Error::RootOfUnityPole(n))
                            }
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let flows: Vec<Vec<u64>> = enumerate_flows(g, n).collect();
    let mut total = ComplexBall::zero(bits);
    for_each_labeling(g.vertex_count(), size, |iota| {
        let mut vf = ComplexBall::one(bits);
        for (v, &deg) in g.degrees.iter().enumerate() {
            vf = vf.mul(&gamma.get(deg, iota[v])?.eval_at(&root));
        }
        let mut s = ComplexBall::zero(bits);
        for phi in &flows {
            let mut p = ComplexBall::one(bits);
            for (e, &(a, b)) in g.edges.iter().enumerate() {
                p = p.mul(&pis[phi[e] as usize][iota[a]][iota[b]]);
            }
            s = s.add(&p);
        }
        total = total.add(&vf.mul(&s));
        Ok(())
    })?;
    let d = g.first_betti() as i64;
    let scale = sigma_inverse(g) * Rational::from_integer((n as i64).into()).pow(1 - d as i32);
    Ok(total.mul_rational(&scale))
}

/// The ordinary weight over the labels of the cover, vertex factors repeated on every sheet.
pub fn weight_direct(
    g: &FeynmanDiagram,
    cover: &BlockCirculant,
    gamma: &VertexFactorTable,
) -> Result<GradedValue> {
    let grade = gamma.diagram_grade(g)?;
    let size = cover.block_size();
    gamma.check(g, size)?;
    let field = cover.field().clone();
    let labels = cover.n() * size;
    let mut total = field.zero();
    for_each_labeling(g.vertex_count(), labels, |iota| {
        let mut p = field.one();
        for &(a, b) in &g.edges {
            p = &p * cover.entry(iota[a], iota[b]);
            if p.is_zero() {
                return Ok(());
            }
        }
        for (v, &deg) in g.degrees.iter().enumerate() {
            p = &p * gamma.get(deg, iota[v] % size)?;
        }
        total = &total + &p;
        Ok(())
    })?;
    Ok(GradedValue {
        grade,
        value: total.scale(&sigma_inverse(g)),
    })
}

/// Coefficient of `hbar^(ell-1)` in the sum of flow weights plus the vacuum term.
pub fn loop_invariant(
    data: &TwistedNZData,
    n: u64,
    diagrams: &[(FeynmanDiagram, VertexFactorTable)],
    gamma0: Option<&GradedValue>,
    ell: i32,
) -> Result<FieldElement> {
    let props = Propagators::from_nz(data, Curve::Longitude)?;
    loop_invariant_with(&props, n, diagrams, gamma0, ell)
}

pub fn loop_invariant_with(
    props: &Propagators,
    n: u64,
    diagrams: &[(FeynmanDiagram, VertexFactorTable)],
    gamma0: Option<&GradedValue>,
    ell: i32,
) -> Result<FieldElement> {
    let target = ell - 1;
    let mut found = false;
    let mut acc = props.field().zero();
    if let Some(g0) = gamma0.filter(|g0| g0.grade == target) {
        acc = &acc + &g0.value;
        found = true;
    }
    for (g, table) in diagrams {
        if table.diagram_grade(g)? != target {
            continue;
        }
        acc = &acc + &weight_flow(g, n, props, table)?.value;
        found = true;
    }
    if !found {
        return Err(Error::GradeMismatch(target));
    }
    Ok(acc)
}

/// Connected multigraphs with `1..=max_edges` edges, up to isomorphism, as
/// `(vertex count, unoriented edges)`.
pub fn small_multigraphs(max_edges: usize) -> Vec<(usize, Vec<(usize, usize)>)> {
    let mut out = Vec::new();
    for e in 1..=max_edges {
        for v in 1..=e + 1 {
            let pairs: Vec<(usize, usize)> =
                (0..v).flat_map(|a| (a..v).map(move |b| (a, b))).collect();
            let mut seen = BTreeSet::new();
            let mut pick = vec![0usize; e];
            loop {
                let edges: Vec<(usize, usize)> = pick.iter().map(|&i| pairs[i]).collect();
                let covered = (0..v).all(|x| edges.iter().any(|&(a, b)| a == x || b == x));
                if covered || v == 1 {
                    if let Ok(g) = FeynmanDiagram::from_edges(
                        v,
                        edges.clone(),
                        Rational::from_integer(1.into()),
                    ) {
                        let key = canonical(v, &g.edges);
                        if seen.insert(key) {
                            out.push((v, edges));
                        }
                    }
                }
                // next nondecreasing index sequence
                let mut pos = e;
                while pos > 0 && pick[pos - 1] == pairs.len() - 1 {
                    pos -= 1;
                }
                if pos == 0 {
                    break;
                }
                pick[pos - 1] += 1;
                let base = pick[pos - 1];
                for p in pick.iter_mut().skip(pos) {
                    *p = base;
                }
            }
        }
    }
    out
}

fn canonical(v: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..v).collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    loop {
        let mut mapped: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a], perm[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        mapped.sort_unstable();
        if best.as_ref().is_none_or(|b| mapped < *b) {
            best = Some(mapped);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// A diagram file: the diagram, its vertex factors and an optional vacuum term.
#[derive(Clone, Debug)]
pub struct DiagramSpec {
    pub diagram: FeynmanDiagram,
    pub factors: VertexFactorTable,
    pub gamma0: Option<GradedValue>,
}

impl DiagramSpec {
    pub fn from_json(v: &Value, field: &Arc<NumberField>) -> Result<Self> {
        let perr = |m: &str| Error::Parse(m.to_string());
        let degrees = v
            .get("vertices")
            .and_then(Value::as_array)
            .ok_or_else(|| perr("diagram needs \"vertices\""))?
            .iter()
            .map(|x| {
                x.get("degree")
                    .and_then(Value::as_u64)
                    .map(|d| d as usize)
                    .ok_or_else(|| perr("vertex needs an integer \"degree\""))
            })
            .collect::<Result<Vec<_>>>()?;
        let edges = v
            .get("edges")
            .and_then(Value::as_array)
            .ok_or_else(|| perr("diagram needs \"edges\""))?
            .iter()
            .map(|e| match e.as_array().map(|a| a.as_slice()) {
                Some([a, b]) => match (a.as_u64(), b.as_u64()) {
                    (Some(a), Some(b)) => Ok((a as usize, b as usize)),
                    _ => Err(perr("edge endpoints must be vertex indices")),
                },
                _ => Err(perr("edges are [v, w] pairs")),
            })
            .collect::<Result<Vec<_>>>()?;
        let sigma = match v.get("symmetry_factor") {
            Some(s) => parse_rational_value(s)?,
            None => Rational::from_integer(1.into()),
        };
        let diagram = FeynmanDiagram::new(degrees, edges, sigma)?;
        let mut factors = VertexFactorTable::new();
        if let Some(vf) = v.get("vertex_factors").and_then(Value::as_object) {
            let grades = vf.get("hbar_grade").and_then(Value::as_object);
            for (k, vals) in vf {
                if k == "hbar_grade" {
                    continue;
                }
                let degree: usize = k
                    .parse()
                    .map_err(|_| perr("vertex factor keys are degrees"))?;
                let values = vals
                    .as_array()
                    .ok_or_else(|| perr("vertex factors are lists, one per tetrahedron"))?
                    .iter()
                    .map(|x| parse_element(x, field))
                    .collect::<Result<Vec<_>>>()?;
                let grade = grades
                    .and_then(|g| g.get(k))
                    .and_then(Value::as_i64)
                    .unwrap_or(0) as i32;
                factors.insert(degree, values, grade);
            }
        }
        let gamma0 = match v.get("gamma0") {
            None | Some(Value::Null) => None,
            Some(g) => Some(GradedValue {
                value: parse_element(
                    g.get("value")
                        .ok_or_else(|| perr("gamma0 needs \"value\""))?,
                    field,
                )?,
                grade: g.get("hbar_grade").and_then(Value::as_i64).unwrap_or(0) as i32,
            }),
        };
        Ok(DiagramSpec {
            diagram,
            factors,
            gamma0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::rat;
    use crate::laurent::{LaurentPolynomial, RationalFunction};

    fn theta() -> FeynmanDiagram {
        FeynmanDiagram::from_edges(2, vec![(0, 1), (0, 1), (0, 1)], rat(8, 1)).unwrap()
    }

    #[test]
    fn flow_counts() {
        let tree = FeynmanDiagram::from_edges(3, vec![(0, 1), (1, 2)], rat(1, 1)).unwrap();
        let flows: Vec<_> = enumerate_flows(&tree, 4).collect();
        assert_eq!(flows, vec![vec![0, 0]]);
        assert_eq!(enumerate_flows(&theta(), 3).count(), 9);
        let bouquet = FeynmanDiagram::from_edges(1, vec![(0, 0), (0, 0)], rat(8, 1)).unwrap();
        let flows: BTreeSet<_> = enumerate_flows(&bouquet, 5).collect();
        assert_eq!(flows.len(), 25);
        for g in [
            theta(),
            bouquet,
            FeynmanDiagram::from_edges(2, vec![(0, 1), (1, 0), (1, 1)], rat(1, 1)).unwrap(),
        ] {
            for phi in enumerate_flows(&g, 4) {
                for v in 0..g.vertex_count() {
                    let inflow: u64 = g
                        .edges
                        .iter()
                        .zip(&phi)
                        .filter(|((_, b), _)| *b == v)
                        .map(|(_, x)| x)
                        .sum();
                    let outflow: u64 = g
                        .edges
                        .iter()
                        .zip(&phi)
                        .filter(|((a, _), _)| *a == v)
                        .map(|(_, x)| x)
                        .sum();
                    assert_eq!(inflow % 4, outflow % 4);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_diagrams() {
        assert!(FeynmanDiagram::new(vec![1, 1, 0], vec![(0, 1)], rat(1, 1)).is_err());
        assert!(FeynmanDiagram::new(vec![2, 1], vec![(0, 1)], rat(1, 1)).is_err());
        assert!(FeynmanDiagram::from_edges(2, vec![(0, 0)], rat(1, 1)).is_err());
    }

    fn scalar_props() -> Propagators {
        let q = NumberField::rationals();
        let d = LaurentPolynomial::from_ints(&q, -1, &[1, -5, 1]);
        let pi = RatMatrix::from_fn(&q, 1, 1, |_, _| RationalFunction::recip_of(&d).unwrap());
        let p0 = pi.eval(&q.one()).unwrap();
        Propagators::new(pi, p0).unwrap()
    }

    fn unit_factors() -> VertexFactorTable {
        let q = NumberField::rationals();
        let mut t = VertexFactorTable::new();
        for k in 1..=6 {
            t.insert(k, vec![q.one(), q.from_int(2)], 1);
        }
        t
    }

    #[test]
    fn theta_flow_equals_direct() {
        let props = scalar_props();
        let gamma = unit_factors();
        for n in 1..=4 {
            let flow = weight_flow(&theta(), n, &props, &gamma).unwrap();
            let direct = weight_direct(&theta(), &props.cover(n).unwrap(), &gamma).unwrap();
            assert_eq!(flow, direct, "n={n}");
            assert_eq!(flow.grade, 5);
        }
    }

    #[test]
    fn theta_matches_hand_expansion() {
        // (1/8n) sum_{a,b} Pi_a Pi_b Pi_{-a-b} for N = 1, Gamma = 1
        let props = scalar_props();
        let gamma = unit_factors();
        let n = 3u64;
        let flow = weight_flow(&theta(), n, &props, &gamma).unwrap();
        let num = weight_flow_numeric(&theta(), n, &props, &gamma, 0, 40).unwrap();
        let exact = ComplexBall::from_rational(&flow.value.to_rational().unwrap(), num.prec());
        assert!(num.sub(&exact).abs_upper_f64() < 1e-35);
        let q = NumberField::rationals();
        let d = LaurentPolynomial::from_ints(&q, -1, &[1, -5, 1]);
        // sum over flows of 1/(d(w^a) d(w^b) d(w^-a-b)) with 1/n^(d-1) = 1/3
        let mut s = ComplexBall::zero(num.prec());
        for a in 0..n as i64 {
            for b in 0..n as i64 {
                let mut p = ComplexBall::one(num.prec());
                for k in [a, b, -a - b] {
                    let w = ComplexBall::root_of_unity(k, n, num.prec());
                    p = p.mul(
                        &d.eval_ball(&ComplexBall::one(num.prec()), &w)
                            .unwrap()
                            .inv()
                            .unwrap(),
                    );
                }
                s = s.add(&p);
            }
        }
        let hand = s.mul_rational(&rat(1, 24));
        assert!(hand.sub(&exact).abs_upper_f64() < 1e-35);
    }

    #[test]
    fn orientation_does_not_matter() {
        let props = scalar_props();
        let gamma = unit_factors();
        let g = FeynmanDiagram::from_edges(2, vec![(0, 1), (0, 1), (1, 1)], rat(2, 1)).unwrap();
        let w = weight_flow(&g, 4, &props, &gamma).unwrap();
        for i in 0..3 {
            assert_eq!(weight_flow(&g.reversed(i), 4, &props, &gamma).unwrap(), w);
        }
    }

    #[test]
    fn multigraph_census() {
        let graphs = small_multigraphs(3);
        let count = |e: usize| graphs.iter().filter(|(_, es)| es.len() == e).count();
        // two edges: two loops, double edge, edge with loop, path
        assert_eq!((count(1), count(2), count(3)), (2, 4, 11));
    }
}
