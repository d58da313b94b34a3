//! Frequency-domain hydrodynamic coefficients and radiation kernels.
//!
//! Coefficients come either from a JSON file written by an external
//! boundary-element run or from an analytical thin-flap surrogate based on
//! finite-depth wavemaker theory. [`radiation_irf`] turns the tabulated
//! damping into the memory kernel of the time-domain model.

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{hydrostatic_stiffness, WecGeometry};
use crate::num::{trapezoid, Real};

pub const HYDRO_SCHEMA: &str = "wavedesal.hydro/1";

/// Evanescent modes retained in the surrogate's modal sums.
const EVANESCENT_MODES: usize = 400;

/// Panel counts along thickness, width and height for an external mesh.
pub fn mesh_resolution(w: f64, t: f64, h: f64) -> (u32, u32, u32) {
    fn ceil(x: f64) -> u32 {
        let r = x.round();
        // products like 9.1 * 8 / 9.1 land a few ulps above an integer
        if (x - r).abs() < 1e-9 * r.abs().max(1.0) {
            r as u32
        } else {
            x.ceil() as u32
        }
    }
    (ceil(t * 4.0 / 5.0), ceil(w * 26.0 / 30.0), ceil(h * 8.0 / 9.1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct HydroCoefficients<T: Real> {
    pub omega: Vec<T>,
    pub added_mass: Vec<T>,
    pub radiation_damping: Vec<T>,
    pub excitation_mag: Vec<T>,
    pub excitation_phase: Vec<T>,
    pub k_hs: T,
    /// Infinite-frequency added mass when the source provides it.
    pub a_inf: Option<T>,
    pub surrogate: bool,
    /// Hash of the geometry the coefficients were computed for.
    pub geometry_hash: Option<String>,
}

impl<T: Real> HydroCoefficients<T> {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Checks the table invariants, naming the first offending field and row.
    pub fn validate(&self) -> Result<()> {
        let n = self.omega.len();
        let columns: [(&'static str, &Vec<T>); 4] = [
            ("added_mass", &self.added_mass),
            ("radiation_damping", &self.radiation_damping),
            ("excitation_mag", &self.excitation_mag),
            ("excitation_phase", &self.excitation_phase),
        ];
        for (field, col) in columns {
            if col.len() != n {
                return Err(Error::Coefficients {
                    field,
                    row: col.len().min(n),
                    reason: format!("length {} differs from omega length {n}", col.len()),
                });
            }
        }
        if n == 0 {
            return Err(Error::Coefficients { field: "omega", row: 0, reason: "empty table".into() });
        }
        for (row, &w) in self.omega.iter().enumerate() {
            if !(w > T::zero()) || !w.is_finite() {
                return Err(Error::Coefficients { field: "omega", row, reason: format!("{w} is not positive") });
            }
            if row > 0 && w <= self.omega[row - 1] {
                return Err(Error::Coefficients { field: "omega", row, reason: "not strictly increasing".into() });
            }
        }
        for (field, col) in columns {
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::Coefficients { field, row, reason: "not finite".into() });
            }
        }
        if let Some(row) = self.radiation_damping.iter().position(|&b| b < T::zero()) {
            return Err(Error::Coefficients {
                field: "radiation_damping",
                row,
                reason: format!("negative damping {}", self.radiation_damping[row]),
            });
        }
        if let Some(row) = self.excitation_mag.iter().position(|&f| f < T::zero()) {
            return Err(Error::Coefficients { field: "excitation_mag", row, reason: "negative magnitude".into() });
        }
        if !self.k_hs.is_finite() {
            return Err(Error::Coefficients { field: "k_hs", row: 0, reason: "not finite".into() });
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let doc = CoefficientFile {
            schema: HYDRO_SCHEMA.to_owned(),
            surrogate: self.surrogate,
            geometry_hash: self.geometry_hash.clone(),
            k_hs: self.k_hs.to_f64_lossy(),
            a_inf: self.a_inf.map(Real::to_f64_lossy),
            rows: (0..self.len())
                .map(|i| CoefficientRow {
                    omega: self.omega[i].to_f64_lossy(),
                    added_mass: self.added_mass[i].to_f64_lossy(),
                    radiation_damping: self.radiation_damping[i].to_f64_lossy(),
                    excitation_mag: self.excitation_mag[i].to_f64_lossy(),
                    excitation_phase: self.excitation_phase[i].to_f64_lossy(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("coefficient document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CoefficientFile = serde_json::from_str(text)?;
        if doc.schema != HYDRO_SCHEMA {
            return Err(Error::Coefficients {
                field: "schema",
                row: 0,
                reason: format!("unsupported schema `{}`", doc.schema),
            });
        }
        let col = |f: fn(&CoefficientRow) -> f64| doc.rows.iter().map(|r| T::of(f(r))).collect::<Vec<_>>();
        let coeffs = HydroCoefficients {
            omega: col(|r| r.omega),
            added_mass: col(|r| r.added_mass),
            radiation_damping: col(|r| r.radiation_damping),
            excitation_mag: col(|r| r.excitation_mag),
            excitation_phase: col(|r| r.excitation_phase),
            k_hs: T::of(doc.k_hs),
            a_inf: doc.a_inf.map(T::of),
            surrogate: doc.surrogate,
            geometry_hash: doc.geometry_hash,
        };
        coeffs.validate()?;
        Ok(coeffs)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientFile {
    schema: String,
    #[serde(default)]
    surrogate: bool,
    #[serde(default)]
    geometry_hash: Option<String>,
    k_hs: f64,
    #[serde(default)]
    a_inf: Option<f64>,
    rows: Vec<CoefficientRow>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientRow {
    omega: f64,
    added_mass: f64,
    radiation_damping: f64,
    excitation_mag: f64,
    excitation_phase: f64,
}

pub fn load_coefficients<T: Real>(path: &Path) -> Result<HydroCoefficients<T>> {
    HydroCoefficients::from_json(&std::fs::read_to_string(path)?)
}

/// Loads a coefficient file and rejects it unless it was produced for
/// `geom` in water of depth `depth`.
pub fn load_for_geometry<T: Real>(path: &Path, geom: &WecGeometry<T>, depth: T) -> Result<HydroCoefficients<T>> {
    let coeffs = load_coefficients(path)?;
    let expected = geometry_hash(geom, depth);
    match &coeffs.geometry_hash {
        Some(h) if *h == expected => Ok(coeffs),
        other => Err(Error::StaleCoefficients {
            file: other.clone().unwrap_or_else(|| "<none>".into()),
            expected,
        }),
    }
}

/// Stable identifier of the inputs that determine the coefficients.
pub fn geometry_hash<T: Real>(geom: &WecGeometry<T>, depth: T) -> String {
    let fields = [geom.w, geom.t, geom.h, geom.draft, geom.mass, depth];
    let mut hasher = Sha256::new();
    for v in fields {
        hasher.update(v.to_f64_lossy().to_bits().to_le_bytes());
    }
    hex::encode(hasher.finalize())[..16].to_owned()
}

/// Per-unit-width, per-unit-density coefficients of a thin flap hinged at
/// depth `draft`, which only depend on the frequency grid and the water.
#[derive(Debug)]
struct UnitBasis {
    added_mass: Vec<f64>,
    damping: Vec<f64>,
    wavenumber: Vec<f64>,
    group_velocity: Vec<f64>,
    a_inf: f64,
}

type BasisKey = (Vec<u64>, u64, u64, u64);

fn basis_cache() -> &'static Mutex<HashMap<BasisKey, Arc<UnitBasis>>> {
    static CACHE: OnceLock<Mutex<HashMap<BasisKey, Arc<UnitBasis>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn unit_basis(omega: &[f64], depth: f64, draft: f64, g: f64) -> Arc<UnitBasis> {
    let key = (omega.iter().map(|w| w.to_bits()).collect(), depth.to_bits(), draft.to_bits(), g.to_bits());
    if let Some(b) = basis_cache().lock().expect("basis cache poisoned").get(&key) {
        return Arc::clone(b);
    }
    let basis = Arc::new(compute_unit_basis(omega, depth, draft, g));
    basis_cache()
        .lock()
        .expect("basis cache poisoned")
        .insert(key, Arc::clone(&basis));
    basis
}

/// Solves `w^2 = g k tanh(k h)` for the propagating wavenumber.
pub fn wavenumber(omega: f64, depth: f64, g: f64) -> f64 {
    let c = omega * omega * depth / g;
    let f = |x: f64| x * x.tanh() - c;
    let (mut lo, mut hi) = (0.0, c.max(c.sqrt()) + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi) / depth
}

/// Root of `w^2 = -g k tan(k h)` in `((n - 1/2) pi / h, n pi / h)`.
fn evanescent_wavenumber(omega: f64, depth: f64, g: f64, n: usize) -> f64 {
    use std::f64::consts::PI;
    let c = omega * omega * depth / g;
    let f = |x: f64| x * x.tan() + c;
    let (mut lo, mut hi) = ((n as f64 - 0.5) * PI, n as f64 * PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi) / depth
}

/// Moment integral of the evanescent mode `cos(k (z + h))` over the flap.
fn evanescent_moment(k: f64, depth: f64, draft: f64) -> f64 {
    let c = depth - draft;
    draft * (k * depth).sin() / k + ((k * depth).cos() - (k * c).cos()) / (k * k)
}

fn compute_unit_basis(omega: &[f64], depth: f64, draft: f64, g: f64) -> UnitBasis {
    let h = depth;
    let c = h - draft;
    let mut out = UnitBasis {
        added_mass: Vec::with_capacity(omega.len()),
        damping: Vec::with_capacity(omega.len()),
        wavenumber: Vec::with_capacity(omega.len()),
        group_velocity: Vec::with_capacity(omega.len()),
        a_inf: 0.0,
    };
    for &w in omega {
        let k = wavenumber(w, h, g);
        let th = (k * h).tanh();
        let sech2 = 1.0 / (k * h).cosh().powi(2);
        // cosh(k c) / cosh(k h), written to avoid overflow
        let ratio = (-k * draft).exp() * (1.0 + (-2.0 * k * c).exp()) / (1.0 + (-2.0 * k * h).exp());
        let i0 = draft * th / k - (1.0 - ratio) / (k * k);
        let n0 = 0.5 * h * sech2 + th / (2.0 * k);
        // two radiating sides
        out.damping.push(2.0 * w * i0 * i0 / (k * n0));
        let mut a = 0.0;
        for n in 1..=EVANESCENT_MODES {
            let kn = evanescent_wavenumber(w, h, g, n);
            let i_n = evanescent_moment(kn, h, draft);
            let n_n = 0.5 * h + (2.0 * kn * h).sin() / (4.0 * kn);
            a += i_n * i_n / (kn * n_n);
        }
        out.added_mass.push(2.0 * a);
        out.wavenumber.push(k);
        let two_kh = 2.0 * k * h;
        out.group_velocity.push(0.5 * (w / k) * (1.0 + two_kh / two_kh.sinh()));
    }
    let mut a_inf = 0.0;
    for n in 1..=EVANESCENT_MODES {
        let kn = (n as f64 - 0.5) * std::f64::consts::PI / h;
        let i_n = evanescent_moment(kn, h, draft);
        a_inf += i_n * i_n / (kn * 0.5 * h);
    }
    out.a_inf = 2.0 * a_inf;
    out
}

/// Analytical surrogate for a thin bottom-hinged flap in finite depth.
///
/// Damping is the two-dimensional flap wavemaker value per unit width, scaled
/// by the flap width and reduced by `k w / 4`
/// for flaps narrower than `4 / k` so that it never exceeds what a pitching
/// point absorber radiates for the strip excitation. The excitation magnitude
/// comes from the damping through that point-absorber reciprocity relation;
/// its phase is taken as inertia-dominated (pi/2). The infinite-frequency
/// added mass is the strip limit, and the finite-frequency added mass follows
/// from the damping by [`causal_added_mass`], so the memory kernel reproduces
/// the tabulated frequency response. Thickness enters only the stiffness.
pub fn flat_plate_coefficients<T: Real>(
    geom: &WecGeometry<T>,
    omega: &[T],
    depth: T,
    rho: T,
    g: T,
) -> HydroCoefficients<T> {
    let om: Vec<f64> = omega.iter().map(|w| w.to_f64_lossy()).collect();
    let (h, d, gf) = (depth.to_f64_lossy(), geom.draft.to_f64_lossy(), g.to_f64_lossy());
    let basis = unit_basis(&om, h, d, gf);
    let (w, rho_f) = (geom.w.to_f64_lossy(), rho.to_f64_lossy());
    let mut damping = Vec::with_capacity(om.len());
    let mut b_f64 = Vec::with_capacity(om.len());
    let mut excitation_mag = Vec::with_capacity(om.len());
    for i in 0..om.len() {
        let k = basis.wavenumber[i];
        let b = rho_f * w * basis.damping[i] * (0.25 * k * w).min(1.0);
        let f2 = 8.0 * rho_f * gf * basis.group_velocity[i] * b / k;
        b_f64.push(b);
        damping.push(T::of(b));
        excitation_mag.push(T::of(f2.max(0.0).sqrt()));
    }
    let a_inf = rho_f * w * basis.a_inf;
    HydroCoefficients {
        omega: omega.to_vec(),
        added_mass: causal_added_mass(&om, &b_f64, a_inf).into_iter().map(T::of).collect(),
        radiation_damping: damping,
        excitation_mag,
        excitation_phase: vec![T::FRAC_PI_2(); om.len()],
        k_hs: hydrostatic_stiffness(geom, rho, g),
        a_inf: Some(T::of(a_inf)),
        surrogate: true,
        geometry_hash: Some(geometry_hash(geom, depth)),
    }
}

/// Added mass implied by causality, `A(w) = A_inf + 2/pi PV int B(v) / (v^2 - w^2) dv`.
///
/// `B` is extended the same way as for the default kernel: held constant
/// below the grid, linear between nodes, decaying as `w^-3` above it. Each
/// piece integrates in closed form; logarithmic singularities at the nodes
/// cancel between neighbouring pieces and are dropped.
pub fn causal_added_mass(omega: &[f64], damping: &[f64], a_inf: f64) -> Vec<f64> {
    let n = omega.len();
    let (w_top, b_top) = (omega[n - 1], damping[n - 1]);
    // nodes 0, w_0, ..., w_top with the hold as the first segment
    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push(0.0);
    nodes.extend_from_slice(omega);
    let line = |s: usize| -> (f64, f64) {
        if s == 0 {
            (damping[0], 0.0)
        } else {
            let slope = (damping[s] - damping[s - 1]) / (omega[s] - omega[s - 1]);
            (damping[s - 1] - slope * omega[s - 1], slope)
        }
    };
    omega
        .iter()
        .map(|&w| {
            let mut h = 0.0;
            for s in 0..n {
                let (a, b) = (nodes[s], nodes[s + 1]);
                let (alpha, beta) = line(s);
                h -= (alpha - beta * w) * ((b + w) / (a + w)).ln();
            }
            for (j, &v) in nodes.iter().enumerate() {
                let left = if j > 0 { line(j - 1) } else { (0.0, 0.0) };
                let right = if j < n { line(j) } else { (0.0, 0.0) };
                let mut c = (left.0 + left.1 * w) - (right.0 + right.1 * w);
                if j == n {
                    c -= b_top * w_top.powi(3) / w.powi(3);
                }
                let d = (v - w).abs();
                if d > 1e-12 * w_top {
                    h += c * d.ln();
                }
            }
            h /= 2.0 * w;
            // regular part of the tail; its log|w_top - w| term is in the node sum
            h -= b_top * w_top.powi(3) * (0.5 / (w * w * w_top * w_top) + ((w_top + w).ln() - 2.0 * w_top.ln()) / (2.0 * w.powi(4)));
            a_inf + std::f64::consts::FRAC_2_PI * h
        })
        .collect()
}

/// How the damping table is transformed into the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IrfMethod {
    /// Trapezoid over the tabulated grid only; `A_inf` is the added mass at
    /// the highest frequency.
    Trapezoid,
    /// Exact cosine transform of the piecewise-linear damping, held constant
    /// down to zero frequency and optionally continued beyond the grid with
    /// an `w^-3` tail. `A_inf` comes from the coefficients when available,
    /// otherwise from the Kramers-Kronig relation at the top frequency.
    PiecewiseLinear { tail: bool },
}

impl Default for IrfMethod {
    fn default() -> Self {
        IrfMethod::PiecewiseLinear { tail: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct RadiationKernel<T: Real> {
    pub dt: T,
    /// Samples at `t = j dt`, `j = 0 ..= duration / dt`.
    pub k: Vec<T>,
    pub a_inf: T,
    /// Set when the tail sample exceeds 5% of the peak.
    pub decay_warning: bool,
    pub method: IrfMethod,
}

impl<T: Real> RadiationKernel<T> {
    pub fn duration(&self) -> T {
        self.dt * T::of(self.k.len().saturating_sub(1) as f64)
    }

    /// Linear interpolation, zero beyond the stored duration.
    pub fn at(&self, t: T) -> T {
        let x = t / self.dt;
        let j = x.floor();
        let Some(i) = j.to_usize() else { return T::zero() };
        if i + 1 >= self.k.len() {
            return if i + 1 == self.k.len() && x == j { self.k[i] } else { T::zero() };
        }
        let f = x - j;
        self.k[i] + f * (self.k[i + 1] - self.k[i])
    }
}

pub fn radiation_irf<T: Real>(coeffs: &HydroCoefficients<T>, dt: T, duration: T) -> RadiationKernel<T> {
    radiation_irf_with(coeffs, dt, duration, IrfMethod::default())
}

pub fn radiation_irf_with<T: Real>(
    coeffs: &HydroCoefficients<T>,
    dt: T,
    duration: T,
    method: IrfMethod,
) -> RadiationKernel<T> {
    let transform = DampingTransform::new(coeffs, method);
    let n = (duration / dt).round().to_usize().unwrap_or(0);
    let dt_f = dt.to_f64_lossy();
    let k: Vec<T> = (0..=n).map(|j| T::of(transform.kernel(j as f64 * dt_f))).collect();
    let peak = k.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let last = k.last().map_or(T::zero(), |v| v.abs());
    let decay_warning = peak > T::zero() && last >= T::of(0.05) * peak;
    if decay_warning {
        log::warn!("radiation kernel has not decayed within {duration} s");
    }
    let a_last = *coeffs.added_mass.last().expect("validated coefficients are non-empty");
    let a_inf = match (method, coeffs.a_inf) {
        (IrfMethod::Trapezoid, _) => a_last,
        (_, Some(a)) => a,
        (_, None) => T::of(transform.kramers_kronig_a_inf(a_last.to_f64_lossy())),
    };
    RadiationKernel { dt, k, a_inf, decay_warning, method }
}

/// Cosine transform `K(t) = 2/pi int B(w) cos(w t) dw` of a damping table.
struct DampingTransform {
    omega: Vec<f64>,
    damping: Vec<f64>,
    method: IrfMethod,
}

impl DampingTransform {
    fn new<T: Real>(coeffs: &HydroCoefficients<T>, method: IrfMethod) -> Self {
        DampingTransform {
            omega: coeffs.omega.iter().map(|w| w.to_f64_lossy()).collect(),
            damping: coeffs.radiation_damping.iter().map(|b| b.to_f64_lossy()).collect(),
            method,
        }
    }

    fn kernel(&self, t: f64) -> f64 {
        let (w, b) = (&self.omega, &self.damping);
        let n = w.len();
        let integral = match self.method {
            IrfMethod::Trapezoid => (0..n)
                .map(|i| {
                    let left = if i > 0 { w[i] - w[i - 1] } else { 0.0 };
                    let right = if i + 1 < n { w[i + 1] - w[i] } else { 0.0 };
                    0.5 * (left + right) * b[i] * (w[i] * t).cos()
                })
                .sum(),
            IrfMethod::PiecewiseLinear { tail } => {
                let mut acc = b[0] * w[0] * sinc(w[0] * t);
                for i in 0..n - 1 {
                    let half = 0.5 * (w[i + 1] - w[i]);
                    let mid = 0.5 * (w[i + 1] + w[i]);
                    let slope = (b[i + 1] - b[i]) / (w[i + 1] - w[i]);
                    let b_mid = 0.5 * (b[i] + b[i + 1]);
                    let y = half * t;
                    acc += b_mid * 2.0 * half * (mid * t).cos() * sinc(y)
                        - slope * (mid * t).sin() * 2.0 * half * half * linear_moment(y);
                }
                if tail {
                    acc += cubic_tail(b[n - 1], w[n - 1], t);
                }
                acc
            }
        };
        std::f64::consts::FRAC_2_PI * integral
    }

    /// `A(w_N) + (1/w_N) int_0^inf K(t) sin(w_N t) dt`.
    fn kramers_kronig_a_inf(&self, a_top: f64) -> f64 {
        let w_top = *self.omega.last().expect("non-empty grid");
        let horizon = 400.0;
        let h = 0.01;
        let n = (horizon / h) as usize;
        let samples: Vec<f64> = (0..=n)
            .map(|j| {
                let t = j as f64 * h;
                self.kernel(t) * (w_top * t).sin()
            })
            .collect();
        a_top + trapezoid(&samples, h) / w_top
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `(sin y - y cos y) / y^2`, the odd moment of a centred linear segment.
fn linear_moment(y: f64) -> f64 {
    if y.abs() < 1e-2 {
        let y2 = y * y;
        y * (1.0 / 3.0 - y2 / 30.0 + y2 * y2 / 840.0)
    } else {
        (y.sin() - y * y.cos()) / (y * y)
    }
}

/// `int_{w_N}^inf b_N (w_N / w)^3 cos(w t) dw`.
fn cubic_tail(b_n: f64, w_n: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.5 * b_n * w_n;
    }
    let x = w_n * t;
    let inner = x.cos() / (2.0 * x * x) - x.sin() / (2.0 * x) + 0.5 * cosine_integral(x);
    b_n * w_n.powi(3) * t * t * inner
}

/// Cosine integral `Ci(x) = gamma + ln x + int_0^x (cos u - 1)/u du`, `x > 0`.
pub fn cosine_integral(x: f64) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    assert!(x > 0.0, "Ci is defined for positive arguments");
    if x <= 2.0 {
        let x2 = x * x;
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..60 {
            let kf = k as f64;
            term *= -x2 / ((2.0 * kf - 1.0) * (2.0 * kf));
            let add = term / (2.0 * kf);
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        EULER + x.ln() + sum
    } else {
        // modified Lentz evaluation of the continued fraction for E1(ix)
        let tiny = 1e-300;
        let mut b = Complex64::new(1.0, x);
        let mut c = Complex64::new(1.0 / tiny, 0.0);
        let mut d = Complex64::new(1.0, 0.0) / b;
        let mut h = d;
        for i in 2..1000 {
            let a = -((i - 1) as f64).powi(2);
            b += Complex64::new(2.0, 0.0);
            d = Complex64::new(1.0, 0.0) / (d * a + b);
            c = b + Complex64::new(a, 0.0) / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).norm() < 1e-16 {
                break;
            }
        }
        h *= Complex64::new(x.cos(), -x.sin());
        -h.re
    }
}
