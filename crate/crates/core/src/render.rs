//! Escape-time rendering of scalar Julia sets and one-parameter matrix
//! slices. Rows render in parallel; per-pixel work is pure, so the output
//! bytes are independent of the worker count.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cmatrix::CMatrix;
use crate::matrix_dyn::{
    self, bounded_orbit, classify_matrix_spectral, ClassifyParams, MatrixVerdict, OrbitBehavior,
};
use crate::poly::MonicPoly;
use crate::scalar_dyn::{self, PerturbedVerdict, ScalarVerdict};

/// Smallest admissible pixel count per axis for a real render.
pub const MIN_PIXELS: usize = 16;

/// Default per-pixel iteration budget.
pub const DEFAULT_RENDER_MAX_ITER: usize = 512;

/// A rectangular window of the complex plane with a pixel raster.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub center_re: f64,
    pub center_im: f64,
    pub width: f64,
    pub height: f64,
    pub px_w: usize,
    pub px_h: usize,
}

impl GridSpec {
    pub fn new(
        center: Complex64,
        width: f64,
        height: f64,
        px_w: usize,
        px_h: usize,
    ) -> Result<Self, String> {
        if !width.is_finite()
            || width <= 0.0
            || !height.is_finite()
            || height <= 0.0
            || !center.re.is_finite()
            || !center.im.is_finite()
        {
            return Err("grid extents must be positive and finite".into());
        }
        if px_w < MIN_PIXELS || px_h < MIN_PIXELS {
            return Err(format!("pixel counts must be at least {MIN_PIXELS}"));
        }
        Ok(GridSpec { center_re: center.re, center_im: center.im, width, height, px_w, px_h })
    }

    /// Center of pixel (row, col); rows run top to bottom.
    pub fn pixel_to_point(&self, row: usize, col: usize) -> Complex64 {
        let re = self.center_re + ((col as f64 + 0.5) / self.px_w as f64 - 0.5) * self.width;
        let im = self.center_im - ((row as f64 + 0.5) / self.px_h as f64 - 0.5) * self.height;
        Complex64::new(re, im)
    }

    /// Half the pixel diagonal: the boundary-proximity radius, so the
    /// julia-proximate band is one to two pixels wide at any zoom.
    pub fn proximity_delta(&self) -> f64 {
        0.5 * (self.width / self.px_w as f64).hypot(self.height / self.px_h as f64)
    }
}

/// How a pixel parameter c becomes a dynamical point.
#[derive(Debug, Clone)]
pub enum SliceFamily {
    /// The point c itself.
    Scalar,
    /// The Jordan block with eigenvalue c: equal eigenvalues on purpose, so
    /// the slice isolates the effect of the nilpotent part.
    Jordan { size: usize },
    /// The pencil A + cB.
    Affine { a: CMatrix, b: CMatrix },
}

impl SliceFamily {
    pub fn affine(a: CMatrix, b: CMatrix) -> Result<Self, String> {
        if a.dim() != b.dim() {
            return Err("affine slice matrices must share one dimension".into());
        }
        Ok(SliceFamily::Affine { a, b })
    }

    fn matrix_at(&self, c: Complex64) -> Option<CMatrix> {
        match self {
            SliceFamily::Scalar => None,
            SliceFamily::Jordan { size } => Some(CMatrix::jordan_block(c, *size)),
            SliceFamily::Affine { a, b } => Some(a + &b.scale(c)),
        }
    }
}

/// Classification route for matrix slices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderMode {
    /// Per-pixel spectral classifier (eigenvalues through the scalar test).
    Spectral,
    /// Per-pixel direct boundedness of the matrix orbit.
    DirectOrbit,
}

/// Compact per-pixel verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictCode {
    Escape { iter: u32 },
    Attracted,
    BoundedOther,
    JuliaProximate,
    Undecided,
}

impl VerdictCode {
    pub fn label(&self) -> &'static str {
        match self {
            VerdictCode::Escape { .. } => "escape",
            VerdictCode::Attracted => "attracted",
            VerdictCode::BoundedOther => "bounded",
            VerdictCode::JuliaProximate => "julia_proximate",
            VerdictCode::Undecided => "undecided",
        }
    }
}

/// Per-pixel verdicts over a grid.
#[derive(Debug, Clone)]
pub struct ClassGrid {
    pub spec: GridSpec,
    pub mode: RenderMode,
    verdicts: Vec<VerdictCode>,
}

impl ClassGrid {
    /// Assembles a grid from row-major verdicts; meant for tests and for
    /// the renderer itself.
    pub fn from_verdicts(spec: GridSpec, mode: RenderMode, verdicts: Vec<VerdictCode>) -> Self {
        assert_eq!(verdicts.len(), spec.px_w * spec.px_h, "verdict count must match the raster");
        ClassGrid { spec, mode, verdicts }
    }

    pub fn verdicts(&self) -> &[VerdictCode] {
        &self.verdicts
    }

    pub fn at(&self, row: usize, col: usize) -> VerdictCode {
        self.verdicts[row * self.spec.px_w + col]
    }

    /// Verdict counts keyed by stable label.
    pub fn histogram(&self) -> BTreeMap<&'static str, usize> {
        let mut h = BTreeMap::new();
        for v in &self.verdicts {
            *h.entry(v.label()).or_insert(0) += 1;
        }
        h
    }
}

/// Rendering knobs; the proximity radius always comes from the pixel size.
#[derive(Debug, Clone, Serialize)]
pub struct RenderParams {
    pub max_iter: usize,
    pub eps: f64,
    pub bound: f64,
    /// Worker threads; `None` uses the global pool.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Default for RenderParams {
    fn default() -> Self {
        RenderParams {
            max_iter: DEFAULT_RENDER_MAX_ITER,
            eps: scalar_dyn::DEFAULT_EPS,
            bound: matrix_dyn::DEFAULT_ORBIT_BOUND,
            threads: None,
        }
    }
}

/// Renders the grid, one verdict per pixel. Deterministic for fixed inputs
/// and byte-identical across worker counts.
pub fn render_grid(
    p: &MonicPoly,
    spec: &GridSpec,
    family: &SliceFamily,
    mode: RenderMode,
    params: &RenderParams,
) -> ClassGrid {
    let delta = spec.proximity_delta();
    let run = || {
        (0..spec.px_h)
            .into_par_iter()
            .map(|row| {
                (0..spec.px_w)
                    .map(|col| classify_pixel(p, spec.pixel_to_point(row, col), family, mode, params, delta))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    let rows = match params.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    };
    let verdicts = rows.into_iter().flatten().collect();
    ClassGrid::from_verdicts(spec.clone(), mode, verdicts)
}

fn classify_pixel(
    p: &MonicPoly,
    c: Complex64,
    family: &SliceFamily,
    mode: RenderMode,
    params: &RenderParams,
    delta: f64,
) -> VerdictCode {
    match family.matrix_at(c) {
        None => scalar_code(scalar_dyn::classify_perturbed(p, c, delta, params.max_iter, params.eps)),
        Some(x) => match mode {
            RenderMode::Spectral => {
                let cparams = ClassifyParams {
                    max_iter: params.max_iter,
                    eps: params.eps,
                    prox_delta: delta,
                    ..ClassifyParams::default()
                };
                match classify_matrix_spectral(p, &x, &cparams) {
                    Err(_) => VerdictCode::Undecided,
                    Ok(mc) => match mc.verdict {
                        MatrixVerdict::Julia { .. } => VerdictCode::JuliaProximate,
                        MatrixVerdict::Undecided { .. } => VerdictCode::Undecided,
                        MatrixVerdict::Fatou { .. } => aggregate_fatou(&mc.eigen_classes),
                    },
                }
            }
            RenderMode::DirectOrbit => match bounded_orbit(p, &x, params.max_iter, params.bound) {
                OrbitBehavior::Escaped { iter } => VerdictCode::Escape { iter: iter as u32 },
                OrbitBehavior::Bounded => VerdictCode::BoundedOther,
                OrbitBehavior::Inconclusive => VerdictCode::Undecided,
            },
        },
    }
}

fn scalar_code(v: PerturbedVerdict) -> VerdictCode {
    match v {
        PerturbedVerdict::JuliaProximate => VerdictCode::JuliaProximate,
        PerturbedVerdict::Undecided => VerdictCode::Undecided,
        PerturbedVerdict::Decisive(class) => match class.verdict {
            ScalarVerdict::BasinInfinity { escape_iter } => {
                VerdictCode::Escape { iter: escape_iter as u32 }
            }
            ScalarVerdict::AttractingBasin { .. } => VerdictCode::Attracted,
            ScalarVerdict::BoundedNonAttracting => VerdictCode::BoundedOther,
            ScalarVerdict::Undecided => VerdictCode::Undecided,
        },
    }
}

/// Collapses decisively-Fatou eigenvalue verdicts to a pixel code: escape
/// dominates (shaded by the fastest eigenvalue), then attraction.
fn aggregate_fatou(eigen_classes: &[(Complex64, PerturbedVerdict)]) -> VerdictCode {
    let mut min_escape: Option<u32> = None;
    let mut any_attracted = false;
    for (_, class) in eigen_classes {
        if let PerturbedVerdict::Decisive(sc) = class {
            match sc.verdict {
                ScalarVerdict::BasinInfinity { escape_iter } => {
                    let it = escape_iter as u32;
                    min_escape = Some(min_escape.map_or(it, |m| m.min(it)));
                }
                ScalarVerdict::AttractingBasin { .. } => any_attracted = true,
                _ => {}
            }
        }
    }
    match (min_escape, any_attracted) {
        (Some(iter), _) => VerdictCode::Escape { iter },
        (None, true) => VerdictCode::Attracted,
        (None, false) => VerdictCode::BoundedOther,
    }
}

/// Fixed verdict-to-color table. Escape pixels shade with the iteration
/// count; everything else is a flat color.
#[derive(Debug, Clone)]
pub struct Palette {
    pub attracted: [u8; 3],
    pub bounded: [u8; 3],
    pub proximate: [u8; 3],
    pub undecided: [u8; 3],
    /// Escape brightness step per iteration, clamped at 255.
    pub escape_step: u32,
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            attracted: [192, 64, 32],
            bounded: [40, 110, 40],
            proximate: [255, 255, 255],
            undecided: [128, 128, 128],
            escape_step: 8,
        }
    }
}

impl Palette {
    pub fn color(&self, code: VerdictCode) -> [u8; 3] {
        match code {
            VerdictCode::Escape { iter } => {
                let k = (iter.saturating_mul(self.escape_step)).min(255) as u8;
                [k, k, 255]
            }
            VerdictCode::Attracted => self.attracted,
            VerdictCode::BoundedOther => self.bounded,
            VerdictCode::JuliaProximate => self.proximate,
            VerdictCode::Undecided => self.undecided,
        }
    }
}

/// Serializes the grid as binary PPM (`P6`), top-to-bottom row-major.
/// Bit-exact for fixed inputs.
pub fn write_ppm(grid: &ClassGrid, palette: &Palette) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", grid.spec.px_w, grid.spec.px_h);
    let mut out = Vec::with_capacity(header.len() + 3 * grid.verdicts().len());
    out.extend_from_slice(header.as_bytes());
    for &code in grid.verdicts() {
        out.extend_from_slice(&palette.color(code));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn square() -> MonicPoly {
        MonicPoly::power(2).unwrap()
    }

    fn tiny_spec(px: usize) -> GridSpec {
        GridSpec {
            center_re: 0.0,
            center_im: 0.0,
            width: 4.0,
            height: 4.0,
            px_w: px,
            px_h: px,
        }
    }

    #[test]
    fn pixel_mapping_is_affine_and_total() {
        let spec = GridSpec::new(c(0.0, 0.0), 4.0, 4.0, 16, 16).unwrap();
        let top_left = spec.pixel_to_point(0, 0);
        assert!((top_left - c(-2.0 + 0.125, 2.0 - 0.125)).norm() < 1e-12);
        let bottom_right = spec.pixel_to_point(15, 15);
        assert!((bottom_right - c(2.0 - 0.125, -2.0 + 0.125)).norm() < 1e-12);
    }

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new(c(0.0, 0.0), 4.0, 4.0, 8, 16).is_err());
        assert!(GridSpec::new(c(0.0, 0.0), 0.0, 4.0, 16, 16).is_err());
    }

    #[test]
    fn scalar_render_shows_disk_circle_and_exterior() {
        let spec = tiny_spec(48);
        let grid = render_grid(
            &square(),
            &spec,
            &SliceFamily::Scalar,
            RenderMode::Spectral,
            &RenderParams::default(),
        );
        // Center pixel attracted, corner escaped, and a proximate band.
        assert_eq!(grid.at(24, 24), VerdictCode::Attracted);
        assert!(matches!(grid.at(0, 0), VerdictCode::Escape { .. }));
        let hist = grid.histogram();
        assert!(hist.get("julia_proximate").copied().unwrap_or(0) > 0);
        // The proximate band hugs the unit circle.
        for row in 0..48 {
            for col in 0..48 {
                if grid.at(row, col) == VerdictCode::JuliaProximate {
                    let z = spec.pixel_to_point(row, col);
                    assert!(
                        (z.norm() - 1.0).abs() < 0.2,
                        "proximate pixel far from the circle at {z}"
                    );
                }
            }
        }
    }

    #[test]
    fn direct_orbit_bounded_set_shrinks() {
        // Bounded pixels of the nilpotent 3x3 slice are a strict subset of
        // the scalar bounded pixels. An odd pixel count centers the raster
        // on c = 1 exactly, where only the matrix orbit escapes.
        let spec = GridSpec::new(c(1.0, 0.0), 4.0, 4.0, 17, 17).unwrap();
        let params = RenderParams { max_iter: 256, ..RenderParams::default() };
        let matrix_grid = render_grid(
            &square(),
            &spec,
            &SliceFamily::Jordan { size: 3 },
            RenderMode::DirectOrbit,
            &params,
        );
        assert_eq!(spec.pixel_to_point(8, 8), c(1.0, 0.0));
        let mut strictly_smaller = false;
        for row in 0..17 {
            for col in 0..17 {
                let z = spec.pixel_to_point(row, col);
                let scalar_escapes = matches!(
                    scalar_dyn::classify_point(&square(), z, 256, scalar_dyn::DEFAULT_EPS).verdict,
                    ScalarVerdict::BasinInfinity { .. }
                );
                match matrix_grid.at(row, col) {
                    VerdictCode::BoundedOther => {
                        assert!(!scalar_escapes, "matrix bounded outside the filled set at {z}");
                    }
                    VerdictCode::Escape { .. } if !scalar_escapes => {
                        strictly_smaller = true;
                    }
                    _ => {}
                }
            }
        }
        assert!(strictly_smaller, "expected pixels where only the matrix orbit escapes");
    }

    #[test]
    fn ppm_uniform_grid() {
        let spec = tiny_spec(16);
        let grid = ClassGrid::from_verdicts(
            spec,
            RenderMode::Spectral,
            vec![VerdictCode::Attracted; 256],
        );
        let bytes = write_ppm(&grid, &Palette::default());
        assert!(bytes.starts_with(b"P6\n16 16\n255\n"));
        let body = &bytes[b"P6\n16 16\n255\n".len()..];
        assert_eq!(body.len(), 768);
        assert!(body.chunks(3).all(|px| px == [192, 64, 32]));
    }

    #[test]
    fn ppm_single_escape_pixel() {
        let spec = GridSpec {
            center_re: 0.0,
            center_im: 0.0,
            width: 1.0,
            height: 1.0,
            px_w: 1,
            px_h: 1,
        };
        let grid = ClassGrid::from_verdicts(
            spec,
            RenderMode::Spectral,
            vec![VerdictCode::Escape { iter: 1 }],
        );
        let bytes = write_ppm(&grid, &Palette::default());
        assert_eq!(&bytes[bytes.len() - 3..], &[8, 8, 255]);
    }

    #[test]
    fn renders_are_deterministic_and_thread_count_independent() {
        let spec = tiny_spec(32);
        let mk = |threads: Option<usize>| {
            let params = RenderParams { max_iter: 256, threads, ..RenderParams::default() };
            let grid = render_grid(
                &square(),
                &spec,
                &SliceFamily::Scalar,
                RenderMode::Spectral,
                &params,
            );
            write_ppm(&grid, &Palette::default())
        };
        let a = mk(Some(1));
        let b = mk(Some(4));
        let c = mk(Some(1));
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn affine_slice_dimension_check() {
        assert!(SliceFamily::affine(CMatrix::identity(2), CMatrix::identity(3)).is_err());
    }
}
