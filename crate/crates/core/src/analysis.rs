//! Closed-form and sweep analyses over parameter space: the tightest
//! solvable tracking bound, the boundary triangles, tracking power, and
//! region maps. Sweeps use `delta = 2` units.

use std::fmt::Write as _;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::classifier::{classify, ClassKind, Classification, Lemma};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::model::ProblemInstance;

fn is_under(r_p: &Rational, r_t: &Rational, delta: &Rational, c: u64) -> bool {
    match ProblemInstance::new(r_p.clone(), r_t.clone(), delta.clone(), c) {
        Ok(p) => classify(&p).kind() == ClassKind::UnderConstrained,
        Err(_) => false,
    }
}

/// `ceil(delta / r_p)`.
pub fn c_star(r_p: &Rational, delta: &Rational) -> u64 {
    (delta / r_p).ceil().to_u64().unwrap_or(u64::MAX)
}

/// Piecewise closed form for the tightest tracking bound that is solvable
/// from every initial size, with `c* = ceil(delta / r_p)`:
///
/// * `2 r_p` if `r_p >= delta`
/// * `delta` if `c = 1`
/// * `delta / c` if `1 < c < c*`
/// * `(c*+1) r_p / c*` if `c >= c*` and `r_p <= delta c* / (c*^2 - 1)`
/// * `delta / (c* - 1)` otherwise
///
/// When `delta / r_p` is an integer the instance with `r_t = r_p` is already
/// solvable, so the true threshold is `r_p`; see [`rt_star_exact`].
pub fn rt_star(r_p: &Rational, delta: &Rational, c: u64) -> Result<Rational> {
    if !r_p.is_positive() || !delta.is_positive() || c == 0 {
        return Err(Error::InvalidArgument(
            "rt_star needs r_p > 0, delta > 0, c >= 1".into(),
        ));
    }
    if r_p >= delta {
        return Ok(r_p * &Rational::from(2));
    }
    if c == 1 {
        return Ok(delta.clone());
    }
    let cs = c_star(r_p, delta);
    if c < cs {
        return Ok(delta / &Rational::from(c));
    }
    let csr = Rational::from(cs);
    let knee = &(delta * &csr) / &(&(&csr * &csr) - &Rational::one());
    if r_p <= &knee {
        Ok(&(&(&csr + &Rational::one()) * r_p) / &csr)
    } else {
        Ok(delta / &(&csr - &Rational::one()))
    }
}

/// [`rt_star`] corrected on the seam where `delta / r_p` is an integer no
/// larger than `c`.
pub fn rt_star_exact(r_p: &Rational, delta: &Rational, c: u64) -> Result<Rational> {
    let closed = rt_star(r_p, delta, c)?;
    let ratio = delta / r_p;
    if r_p < delta && ratio.is_integer() && ratio.numer().to_u64().is_some_and(|k| k <= c) {
        return Ok(r_p.clone());
    }
    Ok(closed)
}

/// Bracket `(lo, hi)` with `hi - lo <= gap` around the smallest `r_t` whose
/// instance is under-constrained: `lo` is not, `hi` is.
pub fn rt_star_bisect(
    r_p: &Rational,
    delta: &Rational,
    c: u64,
    gap: &Rational,
) -> Result<(Rational, Rational)> {
    if !gap.is_positive() {
        return Err(Error::InvalidArgument("gap must be positive".into()));
    }
    let two = Rational::from(2);
    let mut lo = r_p / &two;
    let mut hi = (r_p * &two).max(delta.clone());
    if is_under(r_p, &lo, delta, c) || !is_under(r_p, &hi, delta, c) {
        return Err(Error::InvalidArgument(
            "bisection bracket does not straddle the threshold".into(),
        ));
    }
    while &(&hi - &lo) > gap {
        let mid = &(&lo + &hi) / &two;
        if is_under(r_p, &mid, delta, c) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

pub type Point = (Rational, Rational);

/// Boundary region for split count `a`, in `(r_p, r_t)` coordinates with
/// `delta = 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Triangle {
    pub a: u64,
    pub vertices: [Point; 3],
}

impl Triangle {
    pub fn new(a: u64) -> Self {
        let ar = Rational::from(a);
        let two = Rational::from(2);
        let one = Rational::one();
        let a2 = &ar * &ar;
        let v1 = (&two / &ar, &(&two * &(&ar + &one)) / &a2);
        let v2 = (&(&two * &ar) / &(&a2 - &one), &two / &(&ar - &one));
        let d3 = &(&a2 + &ar) - &one;
        let ap1 = &ar + &one;
        let v3 = (
            &(&two * &ap1) / &d3,
            &(&(&two * &(&ap1 * &ap1)) / &d3) - &two,
        );
        Triangle {
            a,
            vertices: [v1, v2, v3],
        }
    }

    pub fn centroid(&self) -> Point {
        let three = Rational::from(3);
        let [a, b, c] = &self.vertices;
        (
            &(&(&a.0 + &b.0) + &c.0) / &three,
            &(&(&a.1 + &b.1) + &c.1) / &three,
        )
    }

    pub fn min_y(&self) -> Rational {
        self.vertices
            .iter()
            .map(|v| v.1.clone())
            .min()
            .expect("three vertices")
    }

    pub fn max_y(&self) -> Rational {
        self.vertices
            .iter()
            .map(|v| v.1.clone())
            .max()
            .expect("three vertices")
    }

    /// Closed-triangle membership by exact orientation tests.
    pub fn contains(&self, pt: &Point) -> bool {
        let cross = |o: &Point, a: &Point, b: &Point| {
            &(&(&a.0 - &o.0) * &(&b.1 - &o.1)) - &(&(&a.1 - &o.1) * &(&b.0 - &o.0))
        };
        let [a, b, c] = &self.vertices;
        let d1 = cross(a, b, pt).signum();
        let d2 = cross(b, c, pt).signum();
        let d3 = cross(c, a, pt).signum();
        let neg = d1 < 0 || d2 < 0 || d3 < 0;
        let pos = d1 > 0 || d2 > 0 || d3 > 0;
        !(neg && pos)
    }
}

/// One triangle per `a` in `2..=c`; empty for `c < 2`.
pub fn boundary_triangles(c: u64) -> Vec<Triangle> {
    (2..=c).map(Triangle::new).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerEstimate {
    pub c: u64,
    pub resolution: u32,
    /// Cells whose center is solvable or boundary.
    pub good_cells: u64,
    /// Cells on the diagonal or next to a label change.
    pub uncertain_cells: u64,
    pub estimate: Rational,
    pub error_bound: Rational,
}

impl PowerEstimate {
    pub fn estimate_f64(&self) -> f64 {
        self.estimate.to_f64()
    }

    pub fn error_bound_f64(&self) -> f64 {
        self.error_bound.to_f64()
    }
}

// Cell centers at ((2i+1)/res, (2j+1)/res) with delta = 2, scaled by res so
// every parameter is an integer.
fn grid_good(c: u64, res: u32, i: u32, j: u32) -> bool {
    let p = ProblemInstance::new(
        Rational::from(2 * i as u64 + 1),
        Rational::from(2 * j as u64 + 1),
        Rational::from(2 * res as u64),
        c,
    )
    .expect("positive grid parameters");
    matches!(
        classify(&p).kind(),
        ClassKind::UnderConstrained | ClassKind::Boundary
    )
}

/// Area of solvable-or-boundary instances in `0 <= r_p <= r_t <= 2`
/// (`delta = 2`) by cell counting on a `resolution x resolution` grid.
pub fn tracking_power(c: u64, resolution: u32) -> Result<PowerEstimate> {
    if c == 0 || resolution < 2 {
        return Err(Error::InvalidArgument(
            "tracking_power needs c >= 1 and resolution >= 2".into(),
        ));
    }
    let n = resolution;
    // good[j][i] for i <= j.
    let good: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|j| (0..=j).map(|i| grid_good(c, n, i, j)).collect())
        .collect();
    let at = |i: u32, j: u32| -> Option<bool> {
        if i <= j && j < n {
            Some(good[j as usize][i as usize])
        } else {
            None
        }
    };
    let mut good_cells = 0u64;
    let mut uncertain = 0u64;
    for j in 0..n {
        for i in 0..=j {
            let g = good[j as usize][i as usize];
            if g {
                good_cells += 1;
            }
            let mut mixed = i == j;
            let nbrs = [
                i.checked_sub(1).map(|x| (x, j)),
                Some((i + 1, j)),
                j.checked_sub(1).map(|y| (i, y)),
                Some((i, j + 1)),
            ];
            for (x, y) in nbrs.into_iter().flatten() {
                if let Some(o) = at(x, y) {
                    if o != g {
                        mixed = true;
                    }
                }
            }
            if mixed {
                uncertain += 1;
            }
        }
    }
    let h = Rational::ratio(2, n as i64);
    let h2 = &h * &h;
    Ok(PowerEstimate {
        c,
        resolution: n,
        good_cells,
        uncertain_cells: uncertain,
        estimate: &h2 * &Rational::from(good_cells),
        error_bound: &h2 * &Rational::from(uncertain),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub rp_lo: Rational,
    pub rp_hi: Rational,
    pub rt_lo: Rational,
    pub rt_hi: Rational,
}

impl Window {
    /// `[0, 2] x [0, 2]`
    pub fn unit() -> Self {
        Window {
            rp_lo: Rational::zero(),
            rp_hi: Rational::from(2),
            rt_lo: Rational::zero(),
            rt_hi: Rational::from(2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GridLabel {
    pub class: ClassKind,
    pub lemma: Option<Lemma>,
}

impl From<&Classification> for GridLabel {
    fn from(c: &Classification) -> Self {
        GridLabel {
            class: c.kind(),
            lemma: c.lemma(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionGrid {
    pub c: u64,
    pub resolution: u32,
    pub window: Window,
    /// `cells[i][j]`: `i` indexes `r_p`, `j` indexes `r_t`, both ascending.
    pub cells: Vec<Vec<GridLabel>>,
}

fn center(lo: &Rational, hi: &Rational, k: u32, n: u32) -> Rational {
    lo + &(&(hi - lo) * &Rational::ratio(2 * k as i64 + 1, 2 * n as i64))
}

/// Classifications at the cell centers of a `resolution x resolution` grid with `delta = 2`.
pub fn region_map(c: u64, resolution: u32, window: &Window) -> Result<RegionGrid> {
    if resolution < 2 || c == 0 {
        return Err(Error::InvalidArgument(
            "region_map needs c >= 1 and resolution >= 2".into(),
        ));
    }
    if window.rp_lo >= window.rp_hi
        || window.rt_lo >= window.rt_hi
        || window.rp_lo.is_negative()
        || window.rt_lo.is_negative()
    {
        return Err(Error::InvalidArgument(
            "window must be non-empty and non-negative".into(),
        ));
    }
    let delta = Rational::from(2);
    let n = resolution;
    let cells = (0..n)
        .into_par_iter()
        .map(|i| {
            let rp = center(&window.rp_lo, &window.rp_hi, i, n);
            (0..n)
                .map(|j| {
                    let rt = center(&window.rt_lo, &window.rt_hi, j, n);
                    let p = ProblemInstance::new(rp.clone(), rt, delta.clone(), c)
                        .expect("positive centers");
                    GridLabel::from(&classify(&p))
                })
                .collect()
        })
        .collect();
    Ok(RegionGrid {
        c,
        resolution: n,
        window: window.clone(),
        cells,
    })
}

pub fn class_color(k: ClassKind) -> &'static str {
    match k {
        ClassKind::UnderConstrained => "#5cb85c",
        ClassKind::OverConstrained => "#9e9e9e",
        ClassKind::Boundary => "#f4a6c1",
        ClassKind::TriviallyInfeasible => "#ffffff",
    }
}

impl RegionGrid {
    pub fn center(&self, i: u32, j: u32) -> Point {
        (
            center(&self.window.rp_lo, &self.window.rp_hi, i, self.resolution),
            center(&self.window.rt_lo, &self.window.rt_hi, j, self.resolution),
        )
    }

    pub fn count(&self, pred: impl Fn(u32, u32, &GridLabel) -> bool) -> usize {
        let mut n = 0;
        for (i, col) in self.cells.iter().enumerate() {
            for (j, l) in col.iter().enumerate() {
                if pred(i as u32, j as u32, l) {
                    n += 1;
                }
            }
        }
        n
    }

    /// Header `r_p,r_t,class,lemma`; one row per cell, `r_p` outer.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r_p,r_t,class,lemma\n");
        for (i, col) in self.cells.iter().enumerate() {
            let rp = center(
                &self.window.rp_lo,
                &self.window.rp_hi,
                i as u32,
                self.resolution,
            );
            for (j, l) in col.iter().enumerate() {
                let rt = center(
                    &self.window.rt_lo,
                    &self.window.rt_hi,
                    j as u32,
                    self.resolution,
                );
                let lemma = l.lemma.map(|x| x.to_string()).unwrap_or_default();
                let _ = writeln!(out, "{},{},{},{}", rp, rt, l.class, lemma);
            }
        }
        out
    }

    /// 800x800 map, `r_p` to the right and `r_t` upward, legend top-left.
    pub fn to_svg(&self) -> String {
        const SIZE: f64 = 800.0;
        let n = self.resolution as f64;
        let w = SIZE / n;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" viewBox="0 0 800 800" shape-rendering="crispEdges">"#
        );
        let _ = writeln!(
            out,
            "<title>c={} resolution={} r_p in [{}, {}] r_t in [{}, {}] delta=2</title>",
            self.c,
            self.resolution,
            self.window.rp_lo,
            self.window.rp_hi,
            self.window.rt_lo,
            self.window.rt_hi
        );
        let _ = writeln!(out, "<g id=\"cells\">");
        for (i, col) in self.cells.iter().enumerate() {
            let x = i as f64 * w;
            for (j, l) in col.iter().enumerate() {
                let y = SIZE - (j as f64 + 1.0) * w;
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.4}" y="{:.4}" width="{:.4}" height="{:.4}" fill="{}"/>"#,
                    x,
                    y,
                    w,
                    w,
                    class_color(l.class)
                );
            }
        }
        let _ = writeln!(out, "</g>");
        let _ = writeln!(
            out,
            "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"14\">"
        );
        let _ = writeln!(
            out,
            r##"<rect x="8" y="8" width="190" height="100" fill="#ffffff" fill-opacity="0.85" stroke="#333333"/>"##
        );
        let entries = [
            (ClassKind::UnderConstrained, "under-constrained"),
            (ClassKind::OverConstrained, "over-constrained"),
            (ClassKind::Boundary, "boundary"),
            (ClassKind::TriviallyInfeasible, "trivially infeasible"),
        ];
        for (k, (kind, label)) in entries.iter().enumerate() {
            let y = 16 + 22 * k;
            let _ = writeln!(
                out,
                r##"<rect x="16" y="{}" width="14" height="14" fill="{}" stroke="#333333"/><text x="38" y="{}">{}</text>"##,
                y,
                class_color(*kind),
                y + 12,
                label
            );
        }
        let _ = writeln!(out, "</g>");
        out.push_str("</svg>\n");
        out
    }
}
