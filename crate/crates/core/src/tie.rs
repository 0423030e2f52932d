//! Last passage percolation on a tie: the reflecting strip, ray-traced
//! geometric parameters, weight sampling and the longest-path program.
//!
//! Cells live on a diamond lattice. Row `y >= 1` counts depth from the top
//! cell and `x` is the transversal position; the cells below `(x, y)` are
//! `(x - 1, y + 1)` and `(x + 1, y + 1)`.
//!
//! The up-down tie has walls at `x = 0` and `x = 2n` and top cell `(n, 1)`.
//! Big square `s` puts its cell `(i, j)` at `(n + i - j, 2ns + i + j - 1)`.
//! The big triangles of depth `s` fill the gaps next to the walls: the left
//! one has cells `(j - i, n - 1 + 2ns + i + j)` for `i <= j`, the right one
//! is its mirror image. The upwards tie has walls at `x = 0` and `x = n` and
//! is a stack of big triangles, the `k`-th one with cells at
//! `y = kn + i + j - 1`, hugging the left wall for even `k` and the right
//! wall for odd `k`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measure::{BoundaryParams, Label, Variant};
use crate::partition::{geom_from_uniform, open_uniform, sample_q_partition, Partition};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TieSpec {
    pub variant: Variant,
    /// Side of the big blocks.
    pub n: usize,
    pub u: f64,
    /// Ignored by the upwards tie.
    pub v: f64,
    /// Parameters on the NE border; unused by the upwards tie.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub label: Label,
    pub boundary: BoundaryParams,
    pub tol_depth: f64,
}

impl TieSpec {
    /// All border parameters equal to `q`.
    pub fn geometric(variant: Variant, n: usize, u: f64, v: f64, q: f64) -> Self {
        let v = if variant == Variant::Upwards { 1.0 } else { v };
        Self {
            variant,
            n,
            u,
            v,
            x: vec![q; n],
            y: vec![q; n],
            label: Label::Free,
            boundary: BoundaryParams::default(),
            tol_depth: 1e-8,
        }
    }

    pub fn with_label(mut self, label: Label, boundary: BoundaryParams) -> Self {
        self.label = label;
        self.boundary = boundary;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("n >= 1 required"));
        }
        if !(0.0..1.0).contains(&self.u) {
            return Err(Error::Domain("0 <= u < 1 required"));
        }
        if self.variant == Variant::UpDown && !(0.0..1.0).contains(&self.v) {
            return Err(Error::Domain("0 <= v < 1 required"));
        }
        let need_x = self.variant == Variant::UpDown;
        if self.y.len() != self.n || (need_x && self.x.len() != self.n) {
            return Err(Error::Domain("border parameter lists must have length n"));
        }
        let xs = if need_x { &self.x[..] } else { &[][..] };
        if xs.iter().chain(&self.y).any(|&p| !(0.0..1.0).contains(&p)) {
            return Err(Error::Domain("border parameters must lie in [0, 1)"));
        }
        let b = &self.boundary;
        if [b.a1, b.a2, b.b1, b.b2].iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::Domain("boundary parameters must lie in (0, 1]"));
        }
        if !(self.tol_depth > 0.0) {
            return Err(Error::Domain("tol_depth > 0 required"));
        }
        Ok(())
    }

    /// Base of the free partition kappa.
    pub fn kappa_base(&self) -> f64 {
        match self.variant {
            Variant::UpDown => self.u * self.v,
            Variant::Upwards => self.u,
        }
    }

    fn width(&self) -> usize {
        match self.variant {
            Variant::UpDown => 2 * self.n + 1,
            Variant::Upwards => self.n + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    /// Unit square of a big square.
    Square,
    /// Unit square of a big triangle.
    TriangleSquare,
    /// Unit triangle against a wall.
    Boundary,
}

/// Which top border the cell's parameters come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    X,
    Y,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub row: usize,
    pub pos: usize,
    pub kind: CellKind,
    pub side: Side,
    /// Depth index of the big block.
    pub block: usize,
    /// Position inside the block, both 1-based.
    pub i: usize,
    pub j: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellLaw {
    Geom(f64),
    /// Parity-tilted geometric with extra factor b^{k mod 2}.
    GeomB { b: f64, z: f64 },
}

impl CellLaw {
    /// Prob(X > 0), which bounds the chance the cell matters.
    pub fn nonzero_prob(&self) -> f64 {
        match *self {
            CellLaw::Geom(z) => z,
            CellLaw::GeomB { b, z } => z * (b + z) / (1.0 + b * z),
        }
    }

    pub fn pmf(&self, k: u32) -> f64 {
        match *self {
            CellLaw::Geom(z) => (1.0 - z) * libm::pow(z, k as f64),
            CellLaw::GeomB { b, z } => {
                let odd = if k % 2 == 1 { b } else { 1.0 };
                (1.0 - z * z) / (1.0 + b * z) * odd * libm::pow(z, k as f64)
            }
        }
    }

    /// Inverse-transform sample from a uniform in (0, 1].
    pub fn sample(&self, u: f64) -> u32 {
        match *self {
            CellLaw::Geom(z) => geom_from_uniform(z, u),
            CellLaw::GeomB { b, z } => geom_b_from_uniform(b, z, u),
        }
    }
}

/// Geom^{(b)}(z) with support k >= 0. P(X >= 2m) = z^{2m} and
/// P(X = 2m) = c z^{2m} with c = (1 - z^2)/(1 + b z).
pub fn geom_b_from_uniform(b: f64, z: f64, u: f64) -> u32 {
    if z <= 0.0 {
        return 0;
    }
    let m = geom_from_uniform(z * z, u);
    let c = (1.0 - z * z) / (1.0 + b * z);
    let z2m = libm::pow(z, 2.0 * m as f64);
    if u <= z2m * (1.0 - c) {
        2 * m + 1
    } else {
        2 * m
    }
}

pub fn sample_geom<R: Rng + ?Sized>(z: f64, rng: &mut R) -> Result<u32> {
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Domain("0 <= z < 1 required"));
    }
    Ok(geom_from_uniform(z, open_uniform(rng)))
}

pub fn sample_geom_b<R: Rng + ?Sized>(b: f64, z: f64, rng: &mut R) -> Result<u32> {
    if !(0.0..1.0).contains(&z) || !(0.0..=1.0).contains(&b) {
        return Err(Error::Domain("0 <= z < 1 and 0 <= b <= 1 required"));
    }
    Ok(geom_b_from_uniform(b, z, open_uniform(rng)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    NE,
    NW,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RayHit {
    pub border: Side,
    /// 1-based index along the border.
    pub index: usize,
    pub bounces_right: usize,
    pub bounces_left: usize,
}

/// Follows a light ray from a cell to the top border, reflecting off the walls.
pub fn ray_trace(spec: &TieSpec, cell: (usize, usize), dir: Direction) -> Result<RayHit> {
    let (mut x, mut y) = (cell.0 as i64, cell.1 as i64);
    if !is_cell(spec, x, y) {
        return Err(Error::Invalid("not a cell of the tie"));
    }
    let n = spec.n as i64;
    let wall = (spec.width() - 1) as i64;
    let mut dir = dir;
    let (mut left, mut right) = (0, 0);
    loop {
        match spec.variant {
            Variant::UpDown => {
                if y <= n && dir == Direction::NE && x == n + y - 1 {
                    return Ok(RayHit { border: Side::X, index: y as usize, bounces_right: right, bounces_left: left });
                }
                if y <= n && dir == Direction::NW && x == n - y + 1 {
                    return Ok(RayHit { border: Side::Y, index: y as usize, bounces_right: right, bounces_left: left });
                }
            }
            Variant::Upwards => {
                if y <= n && dir == Direction::NE && x == y - 1 {
                    return Ok(RayHit { border: Side::Y, index: y as usize, bounces_right: right, bounces_left: left });
                }
            }
        }
        match dir {
            Direction::NE if x == wall => {
                dir = Direction::NW;
                right += 1;
                continue;
            }
            Direction::NW if x == 0 => {
                dir = Direction::NE;
                left += 1;
                continue;
            }
            _ => {}
        }
        x += if dir == Direction::NE { 1 } else { -1 };
        y -= 1;
        if y < 1 {
            return Err(Error::Invalid("ray left the tie"));
        }
    }
}

fn is_cell(spec: &TieSpec, x: i64, y: i64) -> bool {
    if y < 1 || x < 0 || x >= spec.width() as i64 {
        return false;
    }
    let n = spec.n as i64;
    match spec.variant {
        Variant::UpDown => (x + y - n - 1).rem_euclid(2) == 0 && (x - n).abs() <= y - 1,
        Variant::Upwards => (x + y) % 2 == 1 && x <= y - 1,
    }
}

/// Geometric parameter of a cell, with the boundary label applied.
pub fn cell_parameter(spec: &TieSpec, cell: &Cell) -> CellLaw {
    let (u, v) = (spec.u, spec.v);
    let (i, j) = (cell.i - 1, cell.j - 1);
    let s = cell.block as f64;
    let b = &spec.boundary;
    match spec.variant {
        Variant::UpDown => {
            let uv = u * v;
            let (x, y) = (&spec.x, &spec.y);
            match (cell.kind, cell.side) {
                (CellKind::Square, _) => CellLaw::Geom(libm::pow(uv, 2.0 * s) * x[i] * y[j]),
                (CellKind::TriangleSquare, Side::X) => {
                    CellLaw::Geom(u * u * libm::pow(uv, 2.0 * s) * x[i] * x[j])
                }
                (CellKind::TriangleSquare, _) => {
                    CellLaw::Geom(v * v * libm::pow(uv, 2.0 * s) * y[i] * y[j])
                }
                (CellKind::Boundary, side) => {
                    let z = if side == Side::X {
                        u * libm::pow(uv, s) * x[i]
                    } else {
                        v * libm::pow(uv, s) * y[i]
                    };
                    wall_law(spec.label, b, cell.pos == 0, z)
                }
            }
        }
        Variant::Upwards => {
            let y = &spec.y;
            match cell.kind {
                CellKind::Boundary => {
                    let z = libm::pow(u, s) * y[i];
                    wall_law(spec.label, b, cell.pos != 0, z)
                }
                _ => CellLaw::Geom(libm::pow(u, 2.0 * s) * y[i] * y[j]),
            }
        }
    }
}

/// Law of a wall cell; `first` selects the wall carrying a1/b1.
fn wall_law(label: Label, b: &BoundaryParams, first: bool, z: f64) -> CellLaw {
    match (label, first) {
        (Label::Free, _) => CellLaw::Geom(z),
        (Label::AA, true) | (Label::AB, true) => CellLaw::Geom(b.a1 * z),
        (Label::AA, false) => CellLaw::Geom(b.a2 * z),
        (Label::BB, true) => CellLaw::GeomB { b: b.b1, z },
        (Label::BB, false) | (Label::AB, false) => CellLaw::GeomB { b: b.b2, z },
    }
}

/// The realized part of the tie: all cells of the first `periods` blocks.
#[derive(Debug, Clone)]
pub struct Layout {
    pub spec: TieSpec,
    pub width: usize,
    /// Rows 1..=depth are stored.
    pub depth: usize,
    /// Cells in row-major order with their laws.
    pub cells: Vec<(Cell, CellLaw)>,
    /// Bound on the chance that an omitted cell is nonzero.
    pub omitted_bound: f64,
}

fn period_cells(spec: &TieSpec, p: usize) -> Vec<Cell> {
    let n = spec.n;
    let mut out = Vec::new();
    match spec.variant {
        Variant::UpDown => {
            for i in 1..=n {
                for j in 1..=n {
                    out.push(Cell {
                        row: 2 * n * p + i + j - 1,
                        pos: n + i - j,
                        kind: CellKind::Square,
                        side: Side::Both,
                        block: p,
                        i,
                        j,
                    });
                }
            }
            // even-depth left triangles face the x border, odd ones the y border
            let left_side = if p % 2 == 0 { Side::X } else { Side::Y };
            let right_side = if p % 2 == 0 { Side::Y } else { Side::X };
            for i in 1..=n {
                for j in i..=n {
                    let kind = if i == j { CellKind::Boundary } else { CellKind::TriangleSquare };
                    let row = n - 1 + 2 * n * p + i + j;
                    out.push(Cell { row, pos: j - i, kind, side: left_side, block: p, i, j });
                    out.push(Cell { row, pos: 2 * n - (j - i), kind, side: right_side, block: p, i, j });
                }
            }
        }
        Variant::Upwards => {
            for i in 1..=n {
                for j in i..=n {
                    let kind = if i == j { CellKind::Boundary } else { CellKind::TriangleSquare };
                    let pos = if p % 2 == 0 { j - i } else { n - (j - i) };
                    out.push(Cell { row: p * n + i + j - 1, pos, kind, side: Side::Y, block: p, i, j });
                }
            }
        }
    }
    out
}

impl Layout {
    pub fn new(spec: &TieSpec) -> Result<Self> {
        spec.validate()?;
        let ratio = spec.kappa_base();
        if ratio >= 1.0 {
            return Err(Error::Domain("parameters do not decay with depth"));
        }
        let mut cells = Vec::new();
        let mut p = 0;
        let omitted;
        loop {
            let block: Vec<(Cell, CellLaw)> =
                period_cells(spec, p).into_iter().map(|c| (c, cell_parameter(spec, &c))).collect();
            cells.extend(block);
            let next: f64 = period_cells(spec, p + 1)
                .iter()
                .map(|c| cell_parameter(spec, c).nonzero_prob())
                .sum();
            let bound = next / (1.0 - ratio);
            if bound < spec.tol_depth {
                omitted = bound;
                break;
            }
            p += 1;
            if p > 1_000_000 {
                return Err(Error::Diagnostic { what: "tie depth", value: p as f64, limit: 1e6 });
            }
        }
        cells.sort_by_key(|(c, _)| (c.row, c.pos));
        let depth = cells
            .iter()
            .filter(|(_, law)| law.nonzero_prob() > 0.0)
            .map(|(c, _)| c.row)
            .max()
            .unwrap_or(1);
        cells.retain(|(c, _)| c.row <= depth);
        Ok(Self { spec: spec.clone(), width: spec.width(), depth, cells, omitted_bound: omitted })
    }
}

/// Number of rows realized for a spec.
pub fn truncation_depth(spec: &TieSpec) -> Result<usize> {
    Ok(Layout::new(spec)?.depth)
}

/// One realization of the weights on rows 1..=depth (row-major, `width` per row).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightField {
    pub depth: usize,
    pub width: usize,
    pub weights: Vec<u32>,
}

impl WeightField {
    pub fn zeros(depth: usize, width: usize) -> Self {
        Self { depth, width, weights: vec![0; depth * width] }
    }

    pub fn get(&self, row: usize, pos: usize) -> u32 {
        self.weights[(row - 1) * self.width + pos]
    }

    pub fn set(&mut self, row: usize, pos: usize, w: u32) {
        self.weights[(row - 1) * self.width + pos] = w;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TieSample {
    pub l: u64,
    pub kappa1: u64,
    pub lambda1: u64,
}

/// Counter-based stream for sample `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

impl Layout {
    /// Draws every cell of the layout, one uniform per cell in row-major order.
    pub fn sample_field<R: Rng + ?Sized>(&self, rng: &mut R) -> WeightField {
        let mut f = WeightField::zeros(self.depth, self.width);
        for (c, law) in &self.cells {
            let w = law.sample(open_uniform(rng));
            f.set(c.row, c.pos, w);
        }
        f
    }

    /// Longest SE/SW path from the top cell, reflected by the walls.
    pub fn longest_path(&self, f: &WeightField) -> u64 {
        let w = self.width;
        let mut prev = vec![i64::MIN; w];
        let mut cur = vec![i64::MIN; w];
        let mut best = 0i64;
        for row in 1..=f.depth {
            for (x, c) in cur.iter_mut().enumerate() {
                *c = i64::MIN;
                if !is_cell(&self.spec, x as i64, row as i64) {
                    continue;
                }
                let up = if row == 1 {
                    0
                } else {
                    let l = if x > 0 { prev[x - 1] } else { i64::MIN };
                    let r = if x + 1 < w { prev[x + 1] } else { i64::MIN };
                    l.max(r)
                };
                if up == i64::MIN {
                    continue;
                }
                *c = up + f.get(row, x) as i64;
                best = best.max(*c);
            }
            core::mem::swap(&mut prev, &mut cur);
        }
        best as u64
    }

    /// kappa_1 for the free partition placed below the realized region.
    pub fn sample_kappa1<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let q = self.spec.kappa_base();
        let b = &self.spec.boundary;
        match self.spec.label {
            Label::Free => sample_q_partition(q, rng).map(|k| k.first() as u64).unwrap_or(0),
            // multiplicities of column lengths; kappa_1 counts columns
            Label::AA => {
                let c = b.a1 * b.a2;
                let mut qj = 1.0;
                let mut total = 0u64;
                let mut j = 1;
                loop {
                    qj *= q;
                    let z = if j % 2 == 1 { c * qj } else { qj };
                    if qj / (1.0 - q) < 1e-17 {
                        break;
                    }
                    total += geom_from_uniform(z, open_uniform(rng)) as u64;
                    j += 1;
                }
                total
            }
            // multiplicities of row lengths; kappa_1 is the largest used
            Label::BB => {
                let c = b.b1 * b.b2;
                let mut qj = 1.0;
                let mut largest = 0u64;
                let mut j = 1;
                loop {
                    qj *= q;
                    let z = if j % 2 == 1 { c * qj } else { qj };
                    if qj / (1.0 - q) < 1e-17 {
                        break;
                    }
                    if geom_from_uniform(z, open_uniform(rng)) > 0 {
                        largest = j;
                    }
                    j += 1;
                }
                largest
            }
            Label::AB => loop {
                let k = sample_q_partition(q, rng).unwrap_or_else(|_| Partition::empty());
                let accept = libm::pow(b.a1, k.odd_cols() as f64) * libm::pow(b.b2, k.odd_rows() as f64);
                if rng.random::<f64>() < accept {
                    break k.first() as u64;
                }
            },
        }
    }

    pub fn sample_lambda1<R: Rng + ?Sized>(&self, rng: &mut R) -> TieSample {
        let f = self.sample_field(rng);
        let l = self.longest_path(&f);
        let kappa1 = self.sample_kappa1(rng);
        TieSample { l, kappa1, lambda1: l + kappa1 }
    }

    pub fn cell_at(&self, row: usize, pos: usize) -> Option<&(Cell, CellLaw)> {
        self.cells.iter().find(|(c, _)| c.row == row && c.pos == pos)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_rays() {
        let spec = TieSpec::geometric(Variant::UpDown, 1, 0.3, 0.3, 0.4);
        let hit = ray_trace(&spec, (1, 1), Direction::NE).unwrap();
        assert_eq!(hit, RayHit { border: Side::X, index: 1, bounces_right: 0, bounces_left: 0 });
    }

    #[test]
    fn geom_b_collapses() {
        for k in 0..6 {
            let a = CellLaw::GeomB { b: 1.0, z: 0.4 }.pmf(k);
            let g = CellLaw::Geom(0.4).pmf(k);
            assert!((a - g).abs() < 1e-15);
        }
        assert_eq!(CellLaw::GeomB { b: 0.0, z: 0.4 }.pmf(3), 0.0);
    }

    #[test]
    fn zero_parameters_give_top_square() {
        let spec = TieSpec::geometric(Variant::UpDown, 3, 0.0, 0.0, 0.5);
        assert_eq!(truncation_depth(&spec).unwrap(), 5);
    }
}
