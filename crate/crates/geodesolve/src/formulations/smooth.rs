//! Smooth (nonlinear) program representations and the builders that produce
//! them for every assigned and unassigned formulation kind.
//!
//! Programs are closure-based: each function carries its value and an
//! analytic gradient, and every builder is checked against central finite
//! differences in the test suites.

use super::cycles::fundamental_cycle_basis;
use super::{BuildError, BuildOpts, DgpKind, Sense};
use crate::types::{Assignment, DgpInstance, Realization, UdgpInstance};

pub type ValueFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradFn = Box<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// A differentiable scalar function of the variable vector. The gradient
/// callback accumulates into the output buffer, which the caller zeroes.
pub struct DiffFn {
    pub value: ValueFn,
    pub grad: GradFn,
}

impl DiffFn {
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        (self.grad)(x, &mut g);
        g
    }
}

impl std::fmt::Debug for DiffFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DiffFn")
    }
}

/// Contiguous variable block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub offset: usize,
    pub len: usize,
}

/// Binary assignment block: variable `y[p][l]` lives at
/// `offset + p * m + l`, where `p` indexes the unordered pairs in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct YBlock {
    pub offset: usize,
    pub m: usize,
    pub pairs: Vec<(usize, usize)>, // 1-based, i < j
}

impl YBlock {
    #[inline]
    pub fn index(&self, pair: usize, l: usize) -> usize {
        self.offset + pair * self.m + l
    }

    pub fn len(&self) -> usize {
        self.pairs.len() * self.m
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Where each named block sits inside the flat variable vector. The `x`
/// block is always first: `x[point][coord]` at `point * dim + coord`.
#[derive(Debug, Clone)]
pub struct VarLayout {
    pub n_points: usize,
    pub dim: usize,
    pub z: Option<Block>,
    pub s: Option<Block>,
    pub s_plus: Option<Block>,
    pub s_minus: Option<Block>,
    pub t: Option<usize>,
    pub y: Option<YBlock>,
}

impl VarLayout {
    fn points_only(n_points: usize, dim: usize) -> Self {
        VarLayout {
            n_points,
            dim,
            z: None,
            s: None,
            s_plus: None,
            s_minus: None,
            t: None,
            y: None,
        }
    }

    #[inline]
    pub fn xi(&self, point: usize, coord: usize) -> usize {
        point * self.dim + coord
    }

    pub fn x_len(&self) -> usize {
        self.n_points * self.dim
    }
}

/// A solver-facing nonlinear program: objective and constraints with
/// analytic gradients, variable bounds, and the named block layout.
/// `integral` marks the variables a mixed-integer kind requires to be
/// binary; the local solver rejects programs where any are present.
pub struct SmoothProgram {
    pub n_vars: usize,
    pub sense: Sense,
    pub objective: DiffFn,
    pub eq_constraints: Vec<DiffFn>,
    pub ineq_constraints: Vec<DiffFn>,
    pub bounds: Vec<(f64, f64)>,
    pub layout: VarLayout,
    pub integral: Vec<usize>,
    /// Half-width of the random-start sampling box for the `x` block.
    pub sample_halfwidth: f64,
    /// Fills the dependent blocks (edge differences, slacks, the scalar
    /// penalty variable) consistently with the sampled `x` and `y` blocks,
    /// so starting points do not violate the defining rows by huge margins.
    pub start_adjust: Option<StartAdjustFn>,
    /// Assigned instance behind the program, when there is one; used for
    /// error reporting.
    pub dgp: Option<DgpInstance>,
    /// Unassigned instance behind the program, when there is one.
    pub udgp: Option<UdgpInstance>,
}

pub type StartAdjustFn = Box<dyn Fn(&mut [f64]) + Send + Sync>;

impl SmoothProgram {
    /// Applies the builder's dependent-variable fill to a start vector.
    pub fn adjust_start(&self, v: &mut [f64]) {
        if let Some(adjust) = &self.start_adjust {
            adjust(v);
        }
    }
}

impl std::fmt::Debug for SmoothProgram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothProgram")
            .field("n_vars", &self.n_vars)
            .field("sense", &self.sense)
            .field("eq", &self.eq_constraints.len())
            .field("ineq", &self.ineq_constraints.len())
            .field("integral", &self.integral.len())
            .finish()
    }
}

impl SmoothProgram {
    pub fn has_integrality(&self) -> bool {
        !self.integral.is_empty()
    }

    /// Worst violation over all constraints: `|h|` for equalities,
    /// `max(0, g)` for inequalities.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut v: f64 = 0.0;
        for h in &self.eq_constraints {
            v = v.max(h.eval(x).abs());
        }
        for g in &self.ineq_constraints {
            v = v.max(g.eval(x).max(0.0));
        }
        v
    }

    /// Reads the realization out of the `x` block.
    pub fn extract_realization(&self, x: &[f64]) -> Realization {
        let (n, k) = (self.layout.n_points, self.layout.dim);
        Realization::from_flat(n, k, &x[..n * k]).expect("solver iterates stay finite")
    }

    /// Pins the `y` block to the binary encoding of `a` and clears the
    /// integrality marks, turning a mixed-integer program into a continuous
    /// one on the remaining variables.
    pub fn fix_assignment(&mut self, a: &Assignment) {
        let y = self
            .y_block()
            .expect("program has no assignment block")
            .clone();
        for p in 0..y.pairs.len() {
            for l in 0..y.m {
                let idx = y.index(p, l);
                self.bounds[idx] = (0.0, 0.0);
            }
        }
        for (l, &(i, j)) in a.pairs().iter().enumerate() {
            let p = y
                .pairs
                .iter()
                .position(|&q| q == (i, j))
                .expect("assignment pair within point range");
            self.bounds[y.index(p, l)] = (1.0, 1.0);
        }
        self.integral.clear();
    }

    pub fn y_block(&self) -> Option<&YBlock> {
        self.layout.y.as_ref()
    }
}

/// Central finite-difference gradient of one function, for validation.
pub fn finite_difference_gradient(f: &DiffFn, x: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let step = h * (1.0 + x[i].abs());
        xp[i] = x[i] + step;
        let fp = f.eval(&xp);
        xp[i] = x[i] - step;
        let fm = f.eval(&xp);
        xp[i] = x[i];
        out[i] = (fp - fm) / (2.0 * step);
    }
    out
}

/// Largest gradient error over the objective and every constraint of a
/// program at one point, relative to the gradient's own magnitude (so the
/// check is meaningful for functions whose values dwarf machine precision).
pub fn max_gradient_error(p: &SmoothProgram, x: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    let mut check = |f: &DiffFn| {
        let analytic = f.gradient(x);
        // step near cbrt(machine eps): balances truncation and roundoff for
        // the quartic-scale functions in the catalog
        let numeric = finite_difference_gradient(f, x, 1e-5);
        let scale = 1.0
            + analytic
                .iter()
                .chain(&numeric)
                .fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in analytic.iter().zip(&numeric) {
            worst = worst.max((a - b).abs() / scale);
        }
    };
    check(&p.objective);
    for f in &p.eq_constraints {
        check(f);
    }
    for f in &p.ineq_constraints {
        check(f);
    }
    worst
}

// ---------------------------------------------------------------------------
// shared pieces

#[derive(Clone, Copy)]
struct EdgeData {
    u: usize, // 0-based
    v: usize,
    d2: f64,
}

fn edge_data(inst: &DgpInstance) -> Vec<EdgeData> {
    inst.graph
        .edges()
        .iter()
        .map(|e| EdgeData {
            u: e.u - 1,
            v: e.v - 1,
            d2: e.d * e.d,
        })
        .collect()
}

#[inline]
fn sq_dist(x: &[f64], k: usize, u: usize, v: usize) -> f64 {
    let (a, b) = (&x[u * k..u * k + k], &x[v * k..v * k + k]);
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// One centroid row per coordinate: `sum_u x[u][c] = 0`.
fn centroid_constraints(n: usize, k: usize) -> Vec<DiffFn> {
    (0..k)
        .map(|c| DiffFn {
            value: Box::new(move |x: &[f64]| (0..n).map(|u| x[u * k + c]).sum()),
            grad: Box::new(move |_x: &[f64], g: &mut [f64]| {
                for u in 0..n {
                    g[u * k + c] += 1.0;
                }
            }),
        })
        .collect()
}

fn free_bounds(n: usize) -> Vec<(f64, f64)> {
    vec![(f64::NEG_INFINITY, f64::INFINITY); n]
}

/// Lexicographic list of unordered pairs `(i, j)`, 1-based, `i < j`.
pub(crate) fn pair_list(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 1..=n {
        for j in i + 1..=n {
            pairs.push((i, j));
        }
    }
    pairs
}

// ---------------------------------------------------------------------------
// assigned builders

/// Builds the smooth program for an assigned formulation kind. Centroid rows
/// are appended when `opts.centroid` is set (the default); `Cyc*` kinds pick
/// up cycle constraints from `opts.cycle_constraints` (`Cycle` always has
/// them).
pub fn build_dgp(kind: DgpKind, inst: &DgpInstance, opts: &BuildOpts) -> SmoothProgram {
    let n = inst.graph.n_vertices();
    let k = inst.k;
    let edges = edge_data(inst);
    let m = edges.len();
    let nx = n * k;
    let halfwidth = inst.graph.weight_sum().max(1.0);

    let with_cycles = match kind {
        DgpKind::Cycle => true,
        DgpKind::CycSystem1 | DgpKind::CycSystem2 | DgpKind::CycPushPull => opts.cycle_constraints,
        _ => false,
    };

    let mut layout = VarLayout::points_only(n, k);
    let mut bounds = free_bounds(nx);
    let mut eq: Vec<DiffFn> = Vec::new();
    let mut ineq: Vec<DiffFn> = Vec::new();

    let uses_z = matches!(
        kind,
        DgpKind::Cycle
            | DgpKind::CycleSimple
            | DgpKind::CycSystem1
            | DgpKind::CycSystem2
            | DgpKind::CycPushPull
    );
    if uses_z {
        layout.z = Some(Block {
            offset: bounds.len(),
            len: m * k,
        });
        for e in &edges {
            let d = e.d2.sqrt();
            for _ in 0..k {
                bounds.push((-d, d));
            }
        }
    }
    let z_off = layout.z.map(|b| b.offset);

    // linearization rows (x_u - x_v = z_e) for every z-kind
    if let Some(zo) = z_off {
        for (ei, e) in edges.iter().enumerate() {
            let (u, v) = (e.u, e.v);
            for c in 0..k {
                let zi = zo + ei * k + c;
                eq.push(DiffFn {
                    value: Box::new(move |x: &[f64]| x[u * k + c] - x[v * k + c] - x[zi]),
                    grad: Box::new(move |_x: &[f64], g: &mut [f64]| {
                        g[u * k + c] += 1.0;
                        g[v * k + c] -= 1.0;
                        g[zi] -= 1.0;
                    }),
                });
            }
        }
        if with_cycles {
            for cycle in fundamental_cycle_basis(&inst.graph).cycles {
                for c in 0..k {
                    let terms: Vec<(usize, f64)> = cycle
                        .iter()
                        .map(|&(eidx, sign)| (zo + eidx * k + c, sign as f64))
                        .collect();
                    let tv = terms.clone();
                    eq.push(DiffFn {
                        value: Box::new(move |x: &[f64]| tv.iter().map(|&(i, s)| s * x[i]).sum()),
                        grad: Box::new(move |_x: &[f64], g: &mut [f64]| {
                            for &(i, s) in &terms {
                                g[i] += s;
                            }
                        }),
                    });
                }
            }
        }
    }

    // the squared length of an edge term: either ||x_u - x_v||^2 or ||z_e||^2
    let term_len2 = {
        let edges = edges.clone();
        move |x: &[f64], ei: usize| -> f64 {
            match z_off {
                Some(zo) => (0..k)
                    .map(|c| x[zo + ei * k + c] * x[zo + ei * k + c])
                    .sum(),
                None => sq_dist(x, k, edges[ei].u, edges[ei].v),
            }
        }
    };
    // accumulate w * d(term)/dvars into the gradient
    let term_grad = {
        let edges = edges.clone();
        move |x: &[f64], ei: usize, w: f64, g: &mut [f64]| match z_off {
            Some(zo) => {
                for c in 0..k {
                    g[zo + ei * k + c] += w * 2.0 * x[zo + ei * k + c];
                }
            }
            None => {
                let e = &edges[ei];
                for c in 0..k {
                    let diff = x[e.u * k + c] - x[e.v * k + c];
                    g[e.u * k + c] += w * 2.0 * diff;
                    g[e.v * k + c] -= w * 2.0 * diff;
                }
            }
        }
    };

    let mut sense = Sense::Min;
    let objective: DiffFn = match kind {
        DgpKind::Quartic | DgpKind::Cycle | DgpKind::CycleSimple => {
            let (tl, tg) = (term_len2.clone(), term_grad.clone());
            let ed = edges.clone();
            DiffFn {
                value: Box::new(move |x: &[f64]| {
                    ed.iter()
                        .enumerate()
                        .map(|(ei, e)| {
                            let r = tl(x, ei) - e.d2;
                            r * r
                        })
                        .sum()
                }),
                grad: {
                    let ed = edges.clone();
                    Box::new(move |x: &[f64], g: &mut [f64]| {
                        for (ei, e) in ed.iter().enumerate() {
                            let r = term_len2(x, ei) - e.d2;
                            tg(x, ei, 2.0 * r, g);
                        }
                    })
                },
            }
        }
        DgpKind::System2 | DgpKind::CycSystem2 => {
            let s_off = bounds.len();
            layout.s = Some(Block {
                offset: s_off,
                len: m,
            });
            bounds.extend(free_bounds(m));
            let (tl, tg) = (term_len2.clone(), term_grad.clone());
            for (ei, e) in edges.iter().enumerate() {
                let d2 = e.d2;
                let (tl, tg) = (tl.clone(), tg.clone());
                eq.push(DiffFn {
                    value: Box::new(move |x: &[f64]| tl(x, ei) - d2 - x[s_off + ei]),
                    grad: Box::new(move |x: &[f64], g: &mut [f64]| {
                        tg(x, ei, 1.0, g);
                        g[s_off + ei] -= 1.0;
                    }),
                });
            }
            DiffFn {
                value: Box::new(move |x: &[f64]| (0..m).map(|i| x[s_off + i] * x[s_off + i]).sum()),
                grad: Box::new(move |x: &[f64], g: &mut [f64]| {
                    for i in 0..m {
                        g[s_off + i] += 2.0 * x[s_off + i];
                    }
                }),
            }
        }
        DgpKind::System1 | DgpKind::CycSystem1 => {
            let sp_off = bounds.len();
            layout.s_plus = Some(Block {
                offset: sp_off,
                len: m,
            });
            bounds.extend(std::iter::repeat_n((0.0, f64::INFINITY), m));
            let sm_off = bounds.len();
            layout.s_minus = Some(Block {
                offset: sm_off,
                len: m,
            });
            bounds.extend(std::iter::repeat_n((0.0, f64::INFINITY), m));
            let (tl, tg) = (term_len2.clone(), term_grad.clone());
            for (ei, e) in edges.iter().enumerate() {
                let d2 = e.d2;
                let (tl, tg) = (tl.clone(), tg.clone());
                eq.push(DiffFn {
                    value: Box::new(move |x: &[f64]| {
                        tl(x, ei) - d2 - x[sp_off + ei] + x[sm_off + ei]
                    }),
                    grad: Box::new(move |x: &[f64], g: &mut [f64]| {
                        tg(x, ei, 1.0, g);
                        g[sp_off + ei] -= 1.0;
                        g[sm_off + ei] += 1.0;
                    }),
                });
            }
            DiffFn {
                value: Box::new(move |x: &[f64]| {
                    (0..m).map(|i| x[sp_off + i] + x[sm_off + i]).sum()
                }),
                grad: Box::new(move |_x: &[f64], g: &mut [f64]| {
                    for i in 0..m {
                        g[sp_off + i] += 1.0;
                        g[sm_off + i] += 1.0;
                    }
                }),
            }
        }
        DgpKind::PushPull | DgpKind::CycPushPull => {
            sense = Sense::Max;
            let (tl, tg) = (term_len2.clone(), term_grad.clone());
            for (ei, e) in edges.iter().enumerate() {
                let d2 = e.d2;
                let (tl, tg) = (tl.clone(), tg.clone());
                ineq.push(DiffFn {
                    value: Box::new(move |x: &[f64]| tl(x, ei) - d2),
                    grad: Box::new(move |x: &[f64], g: &mut [f64]| tg(x, ei, 1.0, g)),
                });
            }
            let tl = term_len2.clone();
            DiffFn {
                value: Box::new(move |x: &[f64]| (0..m).map(|ei| tl(x, ei)).sum()),
                grad: Box::new(move |x: &[f64], g: &mut [f64]| {
                    for ei in 0..m {
                        term_grad(x, ei, 1.0, g);
                    }
                }),
            }
        }
        DgpKind::PullPush => {
            let (tl, tg) = (term_len2.clone(), term_grad.clone());
            for (ei, e) in edges.iter().enumerate() {
                let d2 = e.d2;
                let (tl, tg) = (tl.clone(), tg.clone());
                ineq.push(DiffFn {
                    value: Box::new(move |x: &[f64]| d2 - tl(x, ei)),
                    grad: Box::new(move |x: &[f64], g: &mut [f64]| tg(x, ei, -1.0, g)),
                });
            }
            let tl = term_len2.clone();
            DiffFn {
                value: Box::new(move |x: &[f64]| (0..m).map(|ei| tl(x, ei)).sum()),
                grad: Box::new(move |x: &[f64], g: &mut [f64]| {
                    for ei in 0..m {
                        term_grad(x, ei, 1.0, g);
                    }
                }),
            }
        }
    };

    if opts.centroid {
        eq.extend(centroid_constraints(n, k));
    }

    // assigned kinds sample their auxiliary blocks directly (z uniform in
    // its box, slacks at zero); only the unassigned kinds need a
    // dependent-variable fill to keep starting merit values sane
    SmoothProgram {
        n_vars: bounds.len(),
        sense,
        objective,
        eq_constraints: eq,
        ineq_constraints: ineq,
        bounds,
        layout,
        integral: Vec::new(),
        sample_halfwidth: halfwidth,
        start_adjust: None,
        dgp: Some(inst.clone()),
        udgp: None,
    }
}

// ---------------------------------------------------------------------------
// unassigned builders

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UdgpSmoothKind {
    /// Degree-5 mixed-integer polynomial program over `(x, y)`.
    UQuartic,
    /// Continuous exact reformulation over `(x, y, t)`; at a global optimum
    /// of a feasible instance the objective equals `-m`.
    UQuarticCont,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UdgpMinlpKind {
    UPushPull,
    USystem1,
    USystem2,
    UCycSystem1,
}

/// Random starts for the unassigned kinds are seeded at the scale of the
/// largest distance value rather than the (much looser) squared-diameter
/// root: the coordinate block is unbounded, so the box only chooses seeds,
/// and degree-five penalty terms stay numerically tame.
fn sampling_halfwidth(inst: &UdgpInstance) -> f64 {
    inst.distances.iter().fold(1.0f64, |m, &d| m.max(d))
}

/// Normalizes each distance column of the sampled `y` block onto its
/// assignment row (entries sum to one); pinned binary columns pass through
/// unchanged.
fn normalize_y_columns(y: &YBlock, v: &mut [f64]) {
    let np = y.pairs.len();
    for l in 0..y.m {
        let total: f64 = (0..np).map(|p| v[y.index(p, l)]).sum();
        if total > 0.0 {
            for p in 0..np {
                v[y.index(p, l)] /= total;
            }
        } else {
            for p in 0..np {
                v[y.index(p, l)] = 1.0 / np as f64;
            }
        }
    }
}

/// Seeds each free distance column of `y` toward the pairs whose sampled
/// geometry already matches that distance (softmax over squared residuals),
/// leaving pinned columns alone. Purely a seeding heuristic: the solver is
/// free to move the mass anywhere afterwards.
fn seed_y_softmax(y: &YBlock, deltas2: &[f64], k: usize, bounds: &[(f64, f64)], v: &mut [f64]) {
    let np = y.pairs.len();
    let pinned = |l: usize| -> bool {
        (0..np).any(|p| {
            let (lo, hi) = bounds[y.index(p, l)];
            lo == hi
        })
    };
    for (l, &d2) in deltas2.iter().enumerate() {
        if pinned(l) {
            continue;
        }
        let r2: Vec<f64> = y
            .pairs
            .iter()
            .map(|&(i, j)| {
                let sq: f64 = (0..k)
                    .map(|c| (v[(i - 1) * k + c] - v[(j - 1) * k + c]).powi(2))
                    .sum();
                (sq - d2).powi(2)
            })
            .collect();
        let tau = r2.iter().cloned().fold(f64::INFINITY, f64::min).max(1e-9) + 1.0;
        let weights: Vec<f64> = r2.iter().map(|&x| (-x / (4.0 * tau)).exp()).collect();
        let total: f64 = weights.iter().sum();
        for (p, w) in weights.iter().enumerate() {
            v[y.index(p, l)] = w / total;
        }
    }
}

struct UdgpFrame {
    layout: VarLayout,
    bounds: Vec<(f64, f64)>,
    eq: Vec<DiffFn>,
    ineq: Vec<DiffFn>,
    integral: Vec<usize>,
    y: YBlock,
}

/// Variable frame shared by every unassigned builder: `x` block, then the
/// `y` assignment block, plus the assignment rows.
fn udgp_frame(inst: &UdgpInstance, opts: &BuildOpts) -> Result<UdgpFrame, BuildError> {
    let n = inst.n_points;
    let m = inst.m();
    let pairs = pair_list(n);
    if m > pairs.len() {
        return Err(BuildError::TooManyDistances {
            m,
            pairs: pairs.len(),
        });
    }
    let k = inst.k;
    let mut layout = VarLayout::points_only(n, k);
    let mut bounds = free_bounds(n * k);
    let y = YBlock {
        offset: bounds.len(),
        m,
        pairs: pairs.clone(),
    };
    bounds.extend(std::iter::repeat_n((0.0, 1.0), y.len()));
    let integral: Vec<usize> = (y.offset..y.offset + y.len()).collect();
    layout.y = Some(y.clone());

    let mut eq: Vec<DiffFn> = Vec::new();
    let mut ineq: Vec<DiffFn> = Vec::new();
    let np = pairs.len();

    // assignment rows; the default orientation assigns every distance index
    // to exactly one pair and uses each pair at most once, the literal
    // orientation swaps the senses
    for l in 0..m {
        let yb = y.clone();
        let value: ValueFn =
            Box::new(move |x: &[f64]| (0..np).map(|p| x[yb.index(p, l)]).sum::<f64>() - 1.0);
        let yb = y.clone();
        let grad: GradFn = Box::new(move |_x: &[f64], g: &mut [f64]| {
            for p in 0..np {
                g[yb.index(p, l)] += 1.0;
            }
        });
        let row = DiffFn { value, grad };
        if opts.assignment_literal {
            ineq.push(row);
        } else {
            eq.push(row);
        }
    }
    for p in 0..np {
        let yb = y.clone();
        let value: ValueFn =
            Box::new(move |x: &[f64]| (0..m).map(|l| x[yb.index(p, l)]).sum::<f64>() - 1.0);
        let yb = y.clone();
        let grad: GradFn = Box::new(move |_x: &[f64], g: &mut [f64]| {
            for l in 0..m {
                g[yb.index(p, l)] += 1.0;
            }
        });
        let row = DiffFn { value, grad };
        if opts.assignment_literal {
            eq.push(row);
        } else {
            ineq.push(row);
        }
    }

    if opts.centroid {
        eq.extend(centroid_constraints(n, k));
    }

    Ok(UdgpFrame {
        layout,
        bounds,
        eq,
        ineq,
        integral,
        y,
    })
}

/// Per-pair squared-distance residual weighted by the assignment variables:
/// `sum_{p,l} y[p][l] (||x_i - x_j||^2 - delta_l^2)^2` and its gradient.
#[allow(clippy::type_complexity)]
fn uquartic_penalty(
    inst: &UdgpInstance,
    y: &YBlock,
    k: usize,
) -> (
    impl Fn(&[f64]) -> f64 + Clone + Send + Sync,
    impl Fn(&[f64], f64, &mut [f64]) + Clone + Send + Sync,
) {
    let deltas2: Vec<f64> = inst.distances.iter().map(|d| d * d).collect();
    let pairs0: Vec<(usize, usize)> = y.pairs.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
    let yb = y.clone();
    let value = {
        let deltas2 = deltas2.clone();
        let pairs0 = pairs0.clone();
        let yb = yb.clone();
        move |x: &[f64]| -> f64 {
            let mut total = 0.0;
            for (p, &(i, j)) in pairs0.iter().enumerate() {
                let d = sq_dist(x, k, i, j);
                for (l, &dl2) in deltas2.iter().enumerate() {
                    let yv = x[yb.index(p, l)];
                    if yv != 0.0 {
                        let r = d - dl2;
                        total += yv * r * r;
                    }
                }
            }
            total
        }
    };
    let grad = move |x: &[f64], w: f64, g: &mut [f64]| {
        for (p, &(i, j)) in pairs0.iter().enumerate() {
            let d = sq_dist(x, k, i, j);
            let mut coeff = 0.0; // sum_l y * 2r, reused for the x gradient
            for (l, &dl2) in deltas2.iter().enumerate() {
                let r = d - dl2;
                let yv = x[yb.index(p, l)];
                g[yb.index(p, l)] += w * r * r;
                coeff += yv * 2.0 * r;
            }
            for c in 0..k {
                let diff = x[i * k + c] - x[j * k + c];
                g[i * k + c] += w * coeff * 2.0 * diff;
                g[j * k + c] -= w * coeff * 2.0 * diff;
            }
        }
    };
    (value, grad)
}

/// Builds the unassigned quartic kinds.
pub fn build_udgp_smooth(
    kind: UdgpSmoothKind,
    inst: &UdgpInstance,
    opts: &BuildOpts,
) -> Result<SmoothProgram, BuildError> {
    let mut frame = udgp_frame(inst, opts)?;
    let k = inst.k;
    let (pen_value, pen_grad) = uquartic_penalty(inst, &frame.y, k);
    let halfwidth = sampling_halfwidth(inst);

    let program = match kind {
        UdgpSmoothKind::UQuartic => {
            let objective = DiffFn {
                value: Box::new(pen_value),
                grad: Box::new(move |x: &[f64], g: &mut [f64]| pen_grad(x, 1.0, g)),
            };
            let yb = frame.y.clone();
            SmoothProgram {
                n_vars: frame.bounds.len(),
                sense: Sense::Min,
                objective,
                eq_constraints: frame.eq,
                ineq_constraints: frame.ineq,
                bounds: frame.bounds,
                layout: frame.layout,
                integral: frame.integral,
                sample_halfwidth: halfwidth,
                start_adjust: Some(Box::new(move |v: &mut [f64]| {
                    normalize_y_columns(&yb, v);
                })),
                dgp: None,
                udgp: Some(inst.clone()),
            }
        }
        UdgpSmoothKind::UQuarticCont => {
            let t_idx = frame.bounds.len();
            frame.layout.t = Some(t_idx);
            frame.bounds.push((f64::NEG_INFINITY, f64::INFINITY));
            let yb = frame.y.clone();
            let y_len = yb.len();
            let y_off = yb.offset;

            // defining constraint: penalty(x, y) - t = 0
            let pv = pen_value.clone();
            frame.eq.push(DiffFn {
                value: Box::new(move |x: &[f64]| pv(x) - x[t_idx]),
                grad: Box::new(move |x: &[f64], g: &mut [f64]| {
                    pen_grad(x, 1.0, g);
                    g[t_idx] -= 1.0;
                }),
            });

            let objective = DiffFn {
                value: Box::new(move |x: &[f64]| {
                    x[t_idx] - (0..y_len).map(|i| x[y_off + i] * x[y_off + i]).sum::<f64>()
                }),
                grad: Box::new(move |x: &[f64], g: &mut [f64]| {
                    g[t_idx] += 1.0;
                    for i in 0..y_len {
                        g[y_off + i] -= 2.0 * x[y_off + i];
                    }
                }),
            };
            // starting points satisfy the assignment rows and the defining
            // row exactly, with each distance column seeded toward the pairs
            // its sampled geometry already fits
            let start_adjust = {
                let pv = pen_value.clone();
                let yb = frame.y.clone();
                let deltas2: Vec<f64> = inst.distances.iter().map(|d| d * d).collect();
                let bounds = frame.bounds.clone();
                Box::new(move |v: &mut [f64]| {
                    seed_y_softmax(&yb, &deltas2, k, &bounds, v);
                    normalize_y_columns(&yb, v);
                    v[t_idx] = pv(v);
                })
            };
            SmoothProgram {
                n_vars: frame.bounds.len(),
                sense: Sense::Min,
                objective,
                eq_constraints: frame.eq,
                ineq_constraints: frame.ineq,
                bounds: frame.bounds,
                layout: frame.layout,
                integral: Vec::new(),
                sample_halfwidth: halfwidth,
                start_adjust: Some(start_adjust),
                dgp: None,
                udgp: Some(inst.clone()),
            }
        }
    };
    Ok(program)
}

/// Builds the big-M mixed-integer kinds. These are declared with integrality
/// marks and exist for semantics coverage and per-assignment residual
/// checking; at desk scale they are exercised through the brute-force
/// enumeration path rather than a dedicated MINLP engine.
pub fn build_udgp_minlp(
    kind: UdgpMinlpKind,
    inst: &UdgpInstance,
    opts: &BuildOpts,
) -> Result<SmoothProgram, BuildError> {
    let mut frame = udgp_frame(inst, opts)?;
    let k = inst.k;
    let m = inst.m();
    let big_m = inst.big_m();
    let halfwidth = sampling_halfwidth(inst);
    let deltas2: Vec<f64> = inst.distances.iter().map(|d| d * d).collect();
    let pairs0: Vec<(usize, usize)> = frame.y.pairs.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
    let np = pairs0.len();
    let yb = frame.y.clone();

    // pair term: squared distance either directly or through z
    let z_off = match kind {
        UdgpMinlpKind::UCycSystem1 => {
            let off = frame.bounds.len();
            frame.layout.z = Some(Block {
                offset: off,
                len: np * k,
            });
            let r = halfwidth;
            frame.bounds.extend(std::iter::repeat_n((-r, r), np * k));
            for (p, &(i, j)) in pairs0.iter().enumerate() {
                for c in 0..k {
                    let zi = off + p * k + c;
                    frame.eq.push(DiffFn {
                        value: Box::new(move |x: &[f64]| x[i * k + c] - x[j * k + c] - x[zi]),
                        grad: Box::new(move |_x: &[f64], g: &mut [f64]| {
                            g[i * k + c] += 1.0;
                            g[j * k + c] -= 1.0;
                            g[zi] -= 1.0;
                        }),
                    });
                }
            }
            Some(off)
        }
        _ => None,
    };
    let pair_len2 = {
        let pairs0 = pairs0.clone();
        move |x: &[f64], p: usize| -> f64 {
            match z_off {
                Some(zo) => (0..k).map(|c| x[zo + p * k + c] * x[zo + p * k + c]).sum(),
                None => {
                    let (i, j) = pairs0[p];
                    sq_dist(x, k, i, j)
                }
            }
        }
    };
    let pair_grad = {
        let pairs0 = pairs0.clone();
        move |x: &[f64], p: usize, w: f64, g: &mut [f64]| match z_off {
            Some(zo) => {
                for c in 0..k {
                    g[zo + p * k + c] += w * 2.0 * x[zo + p * k + c];
                }
            }
            None => {
                let (i, j) = pairs0[p];
                for c in 0..k {
                    let diff = x[i * k + c] - x[j * k + c];
                    g[i * k + c] += w * 2.0 * diff;
                    g[j * k + c] -= w * 2.0 * diff;
                }
            }
        }
    };

    let mut sense = Sense::Min;
    let objective: DiffFn = match kind {
        UdgpMinlpKind::UPushPull => {
            sense = Sense::Max;
            // upper activation rows only: ||x_i - x_j||^2 <= delta^2 + M(1-y)
            for p in 0..np {
                for (l, &dl2) in deltas2.iter().enumerate() {
                    let yb = yb.clone();
                    let (pl, pg) = (pair_len2.clone(), pair_grad.clone());
                    frame.ineq.push(DiffFn {
                        value: Box::new(move |x: &[f64]| {
                            pl(x, p) - dl2 - big_m * (1.0 - x[yb.index(p, l)])
                        }),
                        grad: {
                            let yb2 = frame.y.clone();
                            Box::new(move |x: &[f64], g: &mut [f64]| {
                                pg(x, p, 1.0, g);
                                g[yb2.index(p, l)] += big_m;
                            })
                        },
                    });
                }
            }
            let (pl, pg) = (pair_len2.clone(), pair_grad.clone());
            let yb = frame.y.clone();
            let yb2 = frame.y.clone();
            let pl2 = pair_len2.clone();
            DiffFn {
                value: Box::new(move |x: &[f64]| {
                    (0..np)
                        .map(|p| (0..m).map(|l| x[yb.index(p, l)]).sum::<f64>() * pl(x, p))
                        .sum()
                }),
                grad: Box::new(move |x: &[f64], g: &mut [f64]| {
                    for p in 0..np {
                        let ysum: f64 = (0..m).map(|l| x[yb2.index(p, l)]).sum();
                        pg(x, p, ysum, g);
                        let term = pl2(x, p);
                        for l in 0..m {
                            g[yb2.index(p, l)] += term;
                        }
                    }
                }),
            }
        }
        UdgpMinlpKind::USystem2 => {
            let s_off = frame.bounds.len();
            frame.layout.s = Some(Block {
                offset: s_off,
                len: m,
            });
            frame.bounds.extend(free_bounds(m));
            for p in 0..np {
                for (l, &dl2) in deltas2.iter().enumerate() {
                    push_two_sided(
                        &mut frame.ineq,
                        pair_len2.clone(),
                        pair_grad.clone(),
                        frame.y.clone(),
                        p,
                        l,
                        dl2,
                        big_m,
                        s_off + l,
                        s_off + l,
                    );
                }
            }
            DiffFn {
                value: Box::new(move |x: &[f64]| (0..m).map(|i| x[s_off + i] * x[s_off + i]).sum()),
                grad: Box::new(move |x: &[f64], g: &mut [f64]| {
                    for i in 0..m {
                        g[s_off + i] += 2.0 * x[s_off + i];
                    }
                }),
            }
        }
        UdgpMinlpKind::USystem1 | UdgpMinlpKind::UCycSystem1 => {
            let sp_off = frame.bounds.len();
            frame.layout.s_plus = Some(Block {
                offset: sp_off,
                len: m,
            });
            frame
                .bounds
                .extend(std::iter::repeat_n((0.0, f64::INFINITY), m));
            let sm_off = frame.bounds.len();
            frame.layout.s_minus = Some(Block {
                offset: sm_off,
                len: m,
            });
            frame
                .bounds
                .extend(std::iter::repeat_n((0.0, f64::INFINITY), m));
            for p in 0..np {
                for (l, &dl2) in deltas2.iter().enumerate() {
                    push_two_sided(
                        &mut frame.ineq,
                        pair_len2.clone(),
                        pair_grad.clone(),
                        frame.y.clone(),
                        p,
                        l,
                        dl2,
                        big_m,
                        sp_off + l,
                        sm_off + l,
                    );
                }
            }
            DiffFn {
                value: Box::new(move |x: &[f64]| {
                    (0..m).map(|i| x[sp_off + i] + x[sm_off + i]).sum()
                }),
                grad: Box::new(move |_x: &[f64], g: &mut [f64]| {
                    for i in 0..m {
                        g[sp_off + i] += 1.0;
                        g[sm_off + i] += 1.0;
                    }
                }),
            }
        }
    };

    let start_adjust = {
        let layout = frame.layout.clone();
        let bounds = frame.bounds.clone();
        let yb = frame.y.clone();
        let pairs0 = pairs0.clone();
        let deltas2 = deltas2.clone();
        Box::new(move |v: &mut [f64]| {
            normalize_y_columns(&yb, v);
            if let Some(z) = layout.z {
                for (pd, &(i, j)) in pairs0.iter().enumerate() {
                    for c in 0..k {
                        let idx = z.offset + pd * k + c;
                        let val = v[i * k + c] - v[j * k + c];
                        v[idx] = val.clamp(bounds[idx].0, bounds[idx].1);
                    }
                }
            }
            let term = |v: &[f64], pd: usize| -> f64 {
                match layout.z {
                    Some(z) => (0..k).map(|c| v[z.offset + pd * k + c].powi(2)).sum(),
                    None => {
                        let (i, j) = pairs0[pd];
                        sq_dist(v, k, i, j)
                    }
                }
            };
            // slacks absorb the residual of whichever pair carries each
            // distance; inactive rows are handled by the big-M terms
            let active = |v: &[f64], l: usize| -> Option<usize> {
                (0..pairs0.len()).find(|&pd| v[yb.index(pd, l)] > 0.5)
            };
            if let Some(sb) = layout.s {
                for (l, &dl2) in deltas2.iter().enumerate() {
                    if let Some(pd) = active(v, l) {
                        v[sb.offset + l] = (term(v, pd) - dl2).abs();
                    }
                }
            }
            if let (Some(sp), Some(sm)) = (layout.s_plus, layout.s_minus) {
                for (l, &dl2) in deltas2.iter().enumerate() {
                    if let Some(pd) = active(v, l) {
                        let r = term(v, pd) - dl2;
                        v[sp.offset + l] = r.max(0.0);
                        v[sm.offset + l] = (-r).max(0.0);
                    }
                }
            }
        })
    };

    Ok(SmoothProgram {
        n_vars: frame.bounds.len(),
        sense,
        objective,
        eq_constraints: frame.eq,
        ineq_constraints: frame.ineq,
        bounds: frame.bounds,
        layout: frame.layout,
        integral: frame.integral,
        sample_halfwidth: halfwidth,
        start_adjust: Some(start_adjust),
        dgp: None,
        udgp: Some(inst.clone()),
    })
}

/// Activation pair for the big-M system kinds:
/// `term - delta^2 <= s_up + M(1-y)` and `-(term - delta^2) <= s_dn + M(1-y)`.
#[allow(clippy::too_many_arguments)]
fn push_two_sided(
    ineq: &mut Vec<DiffFn>,
    pair_len2: impl Fn(&[f64], usize) -> f64 + Clone + Send + Sync + 'static,
    pair_grad: impl Fn(&[f64], usize, f64, &mut [f64]) + Clone + Send + Sync + 'static,
    y: YBlock,
    p: usize,
    l: usize,
    dl2: f64,
    big_m: f64,
    s_up: usize,
    s_dn: usize,
) {
    let (pl, pg) = (pair_len2.clone(), pair_grad.clone());
    let (yb_v, yb_g) = (y.clone(), y.clone());
    ineq.push(DiffFn {
        value: Box::new(move |x: &[f64]| {
            pl(x, p) - dl2 - x[s_up] - big_m * (1.0 - x[yb_v.index(p, l)])
        }),
        grad: Box::new(move |x: &[f64], g: &mut [f64]| {
            pg(x, p, 1.0, g);
            g[s_up] -= 1.0;
            g[yb_g.index(p, l)] += big_m;
        }),
    });
    let (pl, pg) = (pair_len2, pair_grad);
    let (yb_v, yb_g) = (y.clone(), y);
    ineq.push(DiffFn {
        value: Box::new(move |x: &[f64]| {
            dl2 - pl(x, p) - x[s_dn] - big_m * (1.0 - x[yb_v.index(p, l)])
        }),
        grad: Box::new(move |x: &[f64], g: &mut [f64]| {
            pg(x, p, -1.0, g);
            g[s_dn] -= 1.0;
            g[yb_g.index(p, l)] += big_m;
        }),
    });
}

// ---------------------------------------------------------------------------
// point assembly

/// Builds a full variable vector for an assigned-kind program from a
/// realization: the `x` block is copied, `z` is filled with the clamped edge
/// differences, and slack blocks absorb the defining residuals.
pub fn assemble_dgp_start(p: &SmoothProgram, x: &Realization) -> Vec<f64> {
    let mut v = vec![0.0; p.n_vars];
    let k = p.layout.dim;
    for (i, row) in x.coords().iter().enumerate() {
        v[i * k..i * k + k].copy_from_slice(row);
    }
    let inst = p
        .dgp
        .as_ref()
        .expect("assigned program carries its instance");
    let edges = edge_data(inst);
    if let Some(z) = p.layout.z {
        for (ei, e) in edges.iter().enumerate() {
            for c in 0..k {
                let idx = z.offset + ei * k + c;
                let val = x.row(e.u)[c] - x.row(e.v)[c];
                let (lo, hi) = p.bounds[idx];
                v[idx] = val.clamp(lo, hi);
            }
        }
    }
    // residuals measured on the term the program actually uses
    let term = |v: &Vec<f64>, ei: usize| -> f64 {
        match p.layout.z {
            Some(z) => (0..k)
                .map(|c| v[z.offset + ei * k + c].powi(2))
                .sum::<f64>(),
            None => x.sq_dist(edges[ei].u, edges[ei].v),
        }
    };
    if let Some(s) = p.layout.s {
        for (ei, e) in edges.iter().enumerate() {
            v[s.offset + ei] = term(&v, ei) - e.d2;
        }
    }
    if let (Some(sp), Some(sm)) = (p.layout.s_plus, p.layout.s_minus) {
        for (ei, e) in edges.iter().enumerate() {
            let r = term(&v, ei) - e.d2;
            v[sp.offset + ei] = r.max(0.0);
            v[sm.offset + ei] = (-r).max(0.0);
        }
    }
    v
}

/// Builds a full variable vector for an unassigned-kind program from a
/// realization and an assignment: `y` gets the binary encoding, slacks and
/// `t` absorb the residuals of the assigned pairs.
pub fn assemble_udgp_point(p: &SmoothProgram, x: &Realization, a: &Assignment) -> Vec<f64> {
    let mut v = vec![0.0; p.n_vars];
    let k = p.layout.dim;
    for (i, row) in x.coords().iter().enumerate() {
        v[i * k..i * k + k].copy_from_slice(row);
    }
    let inst = p
        .udgp
        .as_ref()
        .expect("unassigned program carries its instance");
    let y = p.y_block().expect("unassigned program has a y block");
    for (l, &(i, j)) in a.pairs().iter().enumerate() {
        let pd = y
            .pairs
            .iter()
            .position(|&q| q == (i, j))
            .expect("pair in range");
        v[y.index(pd, l)] = 1.0;
    }
    if let Some(z) = p.layout.z {
        for (pd, &(i, j)) in y.pairs.iter().enumerate() {
            for c in 0..k {
                let idx = z.offset + pd * k + c;
                let val = x.row(i - 1)[c] - x.row(j - 1)[c];
                let (lo, hi) = p.bounds[idx];
                v[idx] = val.clamp(lo, hi);
            }
        }
    }
    let residual = |l: usize| -> f64 {
        let (i, j) = a.pairs()[l];
        x.sq_dist(i - 1, j - 1) - inst.distances[l] * inst.distances[l]
    };
    if let Some(s) = p.layout.s {
        for l in 0..inst.m() {
            v[s.offset + l] = residual(l).abs();
        }
    }
    if let (Some(sp), Some(sm)) = (p.layout.s_plus, p.layout.s_minus) {
        for l in 0..inst.m() {
            let r = residual(l);
            v[sp.offset + l] = r.max(0.0);
            v[sm.offset + l] = (-r).max(0.0);
        }
    }
    if let Some(t) = p.layout.t {
        // consistent with the defining constraint: t = weighted penalty
        v[t] = a
            .pairs()
            .iter()
            .enumerate()
            .map(|(l, _)| {
                let r = residual(l);
                r * r
            })
            .sum();
    }
    v
}

/// Reads an assignment out of a near-binary `y` block: each distance index
/// must have exactly one value above `1 - tol` and the rest below `tol`.
pub fn extract_assignment(p: &SmoothProgram, v: &[f64], tol: f64) -> Option<Assignment> {
    let y = p.y_block()?;
    let mut pairs = Vec::with_capacity(y.m);
    for l in 0..y.m {
        let mut chosen = None;
        for (pd, &pair) in y.pairs.iter().enumerate() {
            let val = v[y.index(pd, l)];
            if val >= 1.0 - tol {
                if chosen.is_some() {
                    return None;
                }
                chosen = Some(pair);
            } else if val > tol {
                return None;
            }
        }
        pairs.push(chosen?);
    }
    Assignment::new(pairs).ok()
}
