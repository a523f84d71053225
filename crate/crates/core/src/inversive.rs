//! Oriented spheres and planes in inversive coordinates.
//!
//! A vector `v = (b̂, b, b·z)` lives in `R^{n+2}` and represents an oriented
//! sphere when `Q(v) = -1`, where `Q` pairs the first two coordinates as a
//! hyperbolic plane and is negative definite on the rest.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{common_disc, QuadExt};
use crate::matrix::QuadMatrix;

/// The form `Q = [[0, 1/2], [1/2, 0]] ⊕ -I_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QForm {
    pub dim: usize,
}

impl QForm {
    pub fn new(dim: usize) -> Self {
        QForm { dim }
    }

    pub fn size(&self) -> usize {
        self.dim + 2
    }

    pub fn matrix(&self) -> QuadMatrix {
        let k = self.size();
        let mut m = QuadMatrix::zeros(k, k);
        m[(0, 1)] = QuadExt::frac(1, 2);
        m[(1, 0)] = QuadExt::frac(1, 2);
        for i in 2..k {
            m[(i, i)] = QuadExt::from(-1);
        }
        m
    }

    /// `u Q vᵀ` on raw coordinate slices.
    pub fn eval(&self, u: &[QuadExt], v: &[QuadExt]) -> Result<QuadExt> {
        if u.len() != self.size() || v.len() != self.size() {
            return Err(Error::DimensionMismatch { expected: self.size(), found: u.len().max(v.len()) });
        }
        let mut acc = u[0].try_mul(&v[1])?.try_add(&u[1].try_mul(&v[0])?)?;
        acc = acc.try_mul(&QuadExt::frac(1, 2))?;
        for (a, b) in u[2..].iter().zip(&v[2..]) {
            if !a.is_zero() && !b.is_zero() {
                acc = acc.try_sub(&a.try_mul(b)?)?;
            }
        }
        Ok(acc)
    }
}

/// Floating-point version of the form, for solvers and rendering.
pub fn qform_f64(u: &[f64], v: &[f64]) -> f64 {
    0.5 * (u[0] * v[1] + u[1] * v[0]) - u[2..].iter().zip(&v[2..]).map(|(a, b)| a * b).sum::<f64>()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct InversiveVector {
    coords: Vec<QuadExt>,
}

impl InversiveVector {
    /// Wraps raw coordinates `(b̂, b, bz_1, ..., bz_n)` without validation.
    pub fn from_coords(coords: Vec<QuadExt>) -> Result<Self> {
        if coords.len() < 4 {
            return Err(Error::DimensionMismatch { expected: 4, found: coords.len() });
        }
        common_disc(&coords)?;
        Ok(InversiveVector { coords })
    }

    pub fn sphere_from_center_radius(z: &[QuadExt], r: &QuadExt) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::ZeroRadius);
        }
        let b = r.try_inv()?;
        let mut z2 = QuadExt::zero();
        for c in z {
            z2 = z2.try_add(&c.try_mul(c)?)?;
        }
        let cobend = b.try_mul(&z2)?.try_sub(r)?;
        let mut coords = vec![cobend, b.clone()];
        for c in z {
            coords.push(b.try_mul(c)?);
        }
        Self::from_coords(coords)
    }

    /// The plane `{x : normal·x = c}`, encoded as `(2c, 0, normal)`.
    pub fn plane_from_normal_offset(normal: &[QuadExt], c: &QuadExt) -> Result<Self> {
        let mut n2 = QuadExt::zero();
        for x in normal {
            n2 = n2.try_add(&x.try_mul(x)?)?;
        }
        if !n2.is_one() {
            return Err(Error::NonUnitNormal);
        }
        let mut coords = vec![c.try_add(c)?, QuadExt::zero()];
        coords.extend(normal.iter().cloned());
        Self::from_coords(coords)
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 2
    }

    pub fn form(&self) -> QForm {
        QForm::new(self.dim())
    }

    pub fn coords(&self) -> &[QuadExt] {
        &self.coords
    }

    pub fn cobend(&self) -> &QuadExt {
        &self.coords[0]
    }

    pub fn bend(&self) -> &QuadExt {
        &self.coords[1]
    }

    pub fn bz(&self) -> &[QuadExt] {
        &self.coords[2..]
    }

    pub fn is_plane(&self) -> bool {
        self.bend().is_zero()
    }

    pub fn disc(&self) -> u64 {
        common_disc(&self.coords).unwrap_or(0)
    }

    /// `Q(v)`.
    pub fn norm(&self) -> Result<QuadExt> {
        self.form().eval(&self.coords, &self.coords)
    }

    /// True iff `Q(v) = -1` exactly.
    pub fn validate(&self) -> bool {
        matches!(self.norm(), Ok(q) if q == QuadExt::from(-1))
    }

    pub fn product(&self, other: &InversiveVector) -> Result<QuadExt> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        self.form().eval(&self.coords, &other.coords)
    }

    /// Reflection through the wall `s`: `v + 2⟨v,s⟩ s`.
    pub fn reflect(&self, s: &InversiveVector) -> Result<InversiveVector> {
        let k = self.product(s)?;
        if k.is_zero() {
            return Ok(self.clone());
        }
        let k2 = k.try_add(&k)?;
        let coords = self
            .coords
            .iter()
            .zip(&s.coords)
            .map(|(a, b)| a.try_add(&k2.try_mul(b)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(InversiveVector { coords })
    }

    /// Row-vector action `v·M`.
    pub fn apply(&self, m: &QuadMatrix) -> Result<InversiveVector> {
        if m.rows() != self.coords.len() || m.cols() != self.coords.len() {
            return Err(Error::DimensionMismatch { expected: self.coords.len(), found: m.rows() });
        }
        m.disc()?;
        common_disc(self.coords.iter().chain(m.entries()))?;
        Ok(InversiveVector { coords: m.left_apply(&self.coords) })
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(QuadExt::to_f64).collect()
    }

    /// Center and signed radius as floats; `None` for planes.
    pub fn center_radius_f64(&self) -> Option<(Vec<f64>, f64)> {
        if self.is_plane() {
            return None;
        }
        let b = self.bend().to_f64();
        Some((self.bz().iter().map(|x| x.to_f64() / b).collect(), 1.0 / b))
    }
}

impl std::ops::Neg for &InversiveVector {
    type Output = InversiveVector;
    fn neg(self) -> InversiveVector {
        InversiveVector { coords: self.coords.iter().map(|x| -x).collect() }
    }
}

impl fmt::Debug for InversiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "({})", cells.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct WallJson {
    cobend: QuadExt,
    bend: QuadExt,
    bz: Vec<QuadExt>,
}

impl Serialize for InversiveVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WallJson { cobend: self.cobend().clone(), bend: self.bend().clone(), bz: self.bz().to_vec() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for InversiveVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = WallJson::deserialize(d)?;
        let mut coords = vec![w.cobend, w.bend];
        coords.extend(w.bz);
        InversiveVector::from_coords(coords).map_err(serde::de::Error::custom)
    }
}

/// An element of `O_Q` of the form `I + 2 Q sᵀ s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReflectionMatrix(QuadMatrix);

impl ReflectionMatrix {
    pub fn new(s: &InversiveVector) -> Result<Self> {
        if !s.validate() {
            return Err(Error::InvalidWall);
        }
        let k = s.coords.len();
        let qs = s.form().matrix().apply(s.coords());
        let mut m = QuadMatrix::identity(k);
        for i in 0..k {
            for j in 0..k {
                let t = qs[i].try_mul(&s.coords[j])?;
                if !t.is_zero() {
                    m[(i, j)] = m[(i, j)].try_add(&t.try_add(&t)?)?;
                }
            }
        }
        Ok(ReflectionMatrix(m))
    }

    pub fn matrix(&self) -> &QuadMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> QuadMatrix {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QuadExt {
        s.parse().unwrap()
    }

    fn v(xs: &[&str]) -> InversiveVector {
        InversiveVector::from_coords(xs.iter().map(|s| q(s)).collect()).unwrap()
    }

    #[test]
    fn sphere_constructor() {
        let zero = [q("0"), q("0")];
        assert_eq!(InversiveVector::sphere_from_center_radius(&zero, &q("1")).unwrap(), v(&["-1", "1", "0", "0"]));
        assert_eq!(
            InversiveVector::sphere_from_center_radius(&[q("1"), q("0")], &q("1")).unwrap(),
            v(&["0", "1", "1", "0"])
        );
        assert_eq!(InversiveVector::sphere_from_center_radius(&zero, &q("-1")).unwrap(), v(&["1", "-1", "0", "0"]));
        assert_eq!(
            InversiveVector::sphere_from_center_radius(&zero, &q("0")),
            Err(Error::ZeroRadius)
        );
    }

    #[test]
    fn plane_constructor() {
        let p = |n: [&str; 2], c: &str| InversiveVector::plane_from_normal_offset(&[q(n[0]), q(n[1])], &q(c));
        assert_eq!(p(["0", "1"], "0").unwrap(), v(&["0", "0", "0", "1"]));
        assert_eq!(p(["0", "1"], "1").unwrap(), v(&["2", "0", "0", "1"]));
        assert_eq!(p(["1", "0"], "-1/2").unwrap(), v(&["-1", "0", "1", "0"]));
        assert_eq!(p(["1", "1"], "0"), Err(Error::NonUnitNormal));
        let diag = InversiveVector::plane_from_normal_offset(&[q("1/2*sqrt(2)"), q("1/2*sqrt(2)")], &q("0"));
        assert!(diag.unwrap().validate());
    }

    #[test]
    fn products() {
        let a = v(&["-1", "1", "0", "0"]);
        let b = InversiveVector::sphere_from_center_radius(&[q("2"), q("0")], &q("1")).unwrap();
        let axis = v(&["0", "0", "0", "1"]);
        assert_eq!(a.product(&a).unwrap(), q("-1"));
        assert_eq!(a.product(&b).unwrap(), q("1"));
        assert_eq!(a.product(&axis).unwrap(), q("0"));
        let far = InversiveVector::sphere_from_center_radius(&[q("5"), q("0")], &q("1")).unwrap();
        assert!(a.product(&far).unwrap() > q("1"));
    }

    #[test]
    fn validate_examples() {
        assert!(v(&["-1", "1", "0", "0"]).validate());
        assert!(v(&["0", "1", "1", "0"]).validate());
        assert!(!v(&["1", "1", "0", "0"]).validate());
    }

    #[test]
    fn reflection_is_involution() {
        let s = v(&["-1", "1", "0", "0"]);
        let m = ReflectionMatrix::new(&s).unwrap();
        let m2 = m.matrix().try_mul(m.matrix()).unwrap();
        assert!(m2.is_identity());
        assert_eq!(s.apply(m.matrix()).unwrap(), -&s);
        let qm = QForm::new(2).matrix();
        let mq = m.matrix().try_mul(&qm).unwrap().try_mul(&m.matrix().transpose()).unwrap();
        assert_eq!(mq, qm);
        assert_eq!(ReflectionMatrix::new(&v(&["1", "1", "0", "0"])), Err(Error::InvalidWall));
    }

    #[test]
    fn descartes_swap_through_dual_circle() {
        // Outer circle of the (-1,2,2,3) quadruple and the dual circle through
        // the tangency points of the other three.
        let outer = v(&["1", "-1", "0", "0"]);
        let dual = v(&["0", "4", "0", "1"]);
        let img = outer.reflect(&dual).unwrap();
        assert_eq!(img.bend(), &q("15"));
        let m = ReflectionMatrix::new(&dual).unwrap();
        assert_eq!(outer.apply(m.matrix()).unwrap(), img);
    }

    #[test]
    fn json_round_trip() {
        let s = v(&["1/8*sqrt(6)", "2*sqrt(6)", "-1", "-1/2*sqrt(6)"]);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"cobend":"1/8*sqrt(6)","bend":"2*sqrt(6)","bz":["-1","-1/2*sqrt(6)"]}"#);
        let back: InversiveVector = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
