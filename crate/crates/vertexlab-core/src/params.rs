//! Model parameterizations and their exact interrelations.
//!
//! Purpose
//! - Hold the five coupled constants of the critical model in one value type
//!   and construct them from either q or c:
//!   p_c = √q/(1+√q),  c = √(2+√q),  Δ = (2−c²)/2 = −√q/2,
//!   cosh λ = √q/2 = (c²−2)/2,  so that e^λ + e^{−λ} = √q.
//!
//! Why this design
//! - Every downstream formula needs a different member of this family; tying
//!   them together in a validated struct removes a whole class of
//!   "recomputed slightly differently" bugs.
//! - The antiferroelectric limit Δ = −∞ is a first-class citizen (sentinel
//!   values) because the root solver seeds its continuation there, where the
//!   solution is known in closed form.
//!
//! Notes
//! - arccosh is evaluated as ln(x + √(x²−1)) followed by one Newton polish
//!   step, which keeps full relative accuracy even for q barely above 4
//!   (x barely above 1) where the naive form loses digits.
//! - JSON serialization uses decimal strings with 17 significant digits so
//!   that round-trips are bit-exact and schema-stable.

// Domain guards are written `if !(q > 4.0)` on purpose: comparisons with NaN
// are false, so the negated form rejects NaN inputs, while the "equivalent"
// `q <= 4.0` would let NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five coupled constants of the critical model.
///
/// Invariants (checked by [`ModelParams::validate`], enforced by the
/// constructors):
/// - `q > 4`, `c > 2`, `delta < -1`, `lambda > 0`, `p_c ∈ (0,1)`;
/// - `p_c = √q/(1+√q)`, `delta = (2−c²)/2`, `cosh λ = √q/2 = (c²−2)/2`.
///
/// The limit Δ = −∞ is represented by [`ModelParams::delta_infinity`]:
/// `q = ∞`, `p_c = 1`, `c = ∞`, `delta = −∞`, `lambda = ∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Cluster weight of the random-cluster model (> 4).
    pub q: f64,
    /// Self-dual edge probability √q/(1+√q).
    pub p_c: f64,
    /// Six-vertex weight of the c-type vertices, √(2+√q) > 2.
    pub c: f64,
    /// Anisotropy Δ = (2−c²)/2 < −1.
    pub delta: f64,
    /// Positive rapidity-like parameter with cosh λ = √q/2.
    pub lambda: f64,
}

/// Stable arccosh for x ≥ 1: log form plus one Newton polish step.
///
/// The log form alone loses ~half the significant digits of (x−1) as x→1⁺;
/// the Newton step λ ← λ − (cosh λ − x)/sinh λ restores full accuracy
/// everywhere except at x = 1 exactly (excluded by the q > 4 domain).
pub(crate) fn arccosh(x: f64) -> f64 {
    debug_assert!(x >= 1.0);
    let lam = (x + (x * x - 1.0).sqrt()).ln();
    if lam == 0.0 || !lam.is_finite() {
        return lam;
    }
    let sh = lam.sinh();
    if sh == 0.0 {
        return lam;
    }
    lam - (lam.cosh() - x) / sh
}

/// Builds the full parameter set from the cluster weight q.
///
/// Errors if q ≤ 4 (λ would be zero or undefined).
pub fn params_from_q(q: f64) -> Result<ModelParams> {
    if !(q > 4.0) {
        return Err(Error::InvalidParameter(format!(
            "q must exceed 4 (got {q}); the discontinuous regime needs λ > 0"
        )));
    }
    let sq = q.sqrt();
    let c = (2.0 + sq).sqrt();
    Ok(ModelParams {
        q,
        p_c: sq / (1.0 + sq),
        c,
        delta: (2.0 - c * c) / 2.0,
        lambda: arccosh(sq / 2.0),
    })
}

/// Builds the full parameter set from the six-vertex weight c.
///
/// Errors if c ≤ 2 (Δ would be ≥ −1).
pub fn params_from_c(c: f64) -> Result<ModelParams> {
    if !(c > 2.0) {
        return Err(Error::InvalidParameter(format!(
            "c must exceed 2 (got {c}); Δ = (2−c²)/2 must be < −1"
        )));
    }
    let half = (c * c - 2.0) / 2.0; // = √q/2 = cosh λ
    let q = (c * c - 2.0) * (c * c - 2.0);
    Ok(ModelParams {
        q,
        p_c: (2.0 * half) / (1.0 + 2.0 * half),
        c,
        delta: (2.0 - c * c) / 2.0,
        lambda: arccosh(half),
    })
}

impl ModelParams {
    /// The Δ = −∞ sentinel parameter set (all members at their limits).
    ///
    /// Kernel and density functions switch to the exact limit formulas when
    /// they see these values: Θ = y−x, ∂₁Θ = −1, ∂₂Θ = +1, k = id, ρ = 1/4π.
    pub fn delta_infinity() -> Self {
        ModelParams {
            q: f64::INFINITY,
            p_c: 1.0,
            c: f64::INFINITY,
            delta: f64::NEG_INFINITY,
            lambda: f64::INFINITY,
        }
    }

    /// True for the Δ = −∞ sentinel.
    pub fn is_delta_infinite(&self) -> bool {
        self.delta == f64::NEG_INFINITY
    }

    /// Checks all coupling invariants to tolerance `tol` (relative).
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.is_delta_infinite() {
            return Ok(());
        }
        let sq = self.q.sqrt();
        let checks = [
            ("p_c = √q/(1+√q)", self.p_c, sq / (1.0 + sq)),
            ("cosh λ = √q/2", self.lambda.cosh(), sq / 2.0),
            ("cosh λ = (c²−2)/2", self.lambda.cosh(), (self.c * self.c - 2.0) / 2.0),
            ("Δ = (2−c²)/2", self.delta, (2.0 - self.c * self.c) / 2.0),
            ("e^λ+e^{−λ} = √q", self.lambda.exp() + (-self.lambda).exp(), sq),
        ];
        for (name, got, want) in checks {
            if (got - want).abs() > tol * want.abs().max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "invariant {name} violated: {got} vs {want}"
                )));
            }
        }
        if !(self.q > 4.0 && self.c > 2.0 && self.delta < -1.0 && self.lambda > 0.0) {
            return Err(Error::InvalidParameter(
                "parameter outside domain (need q>4, c>2, Δ<−1, λ>0)".into(),
            ));
        }
        Ok(())
    }
}

/// Formats a float as a decimal string with 17 significant digits.
pub fn decimal17(x: f64) -> String {
    format!("{x:.16e}")
}

impl Serialize for ModelParams {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("ModelParams", 5)?;
        st.serialize_field("q", &decimal17(self.q))?;
        st.serialize_field("p_c", &decimal17(self.p_c))?;
        st.serialize_field("c", &decimal17(self.c))?;
        st.serialize_field("Delta", &decimal17(self.delta))?;
        st.serialize_field("lambda", &decimal17(self.lambda))?;
        st.end()
    }
}

/// Accepts either a decimal string or a raw JSON number for each field.
fn float_field<E: de::Error>(v: &serde_json::Value) -> std::result::Result<f64, E> {
    match v {
        serde_json::Value::String(s) => s
            .parse::<f64>()
            .map_err(|e| E::custom(format!("bad decimal string: {e}"))),
        serde_json::Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| E::custom("non-finite JSON number")),
        other => Err(E::custom(format!("expected string or number, got {other}"))),
    }
}

impl<'de> Deserialize<'de> for ModelParams {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ModelParams;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a map with keys q, p_c, c, Delta, lambda")
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<ModelParams, A::Error> {
                let (mut q, mut p_c, mut c, mut delta, mut lambda) =
                    (None, None, None, None, None);
                while let Some(key) = map.next_key::<String>()? {
                    let value: serde_json::Value = map.next_value()?;
                    let x = float_field::<A::Error>(&value)?;
                    match key.as_str() {
                        "q" => q = Some(x),
                        "p_c" => p_c = Some(x),
                        "c" => c = Some(x),
                        "Delta" => delta = Some(x),
                        "lambda" => lambda = Some(x),
                        other => {
                            return Err(de::Error::unknown_field(
                                other,
                                &["q", "p_c", "c", "Delta", "lambda"],
                            ))
                        }
                    }
                }
                Ok(ModelParams {
                    q: q.ok_or_else(|| de::Error::missing_field("q"))?,
                    p_c: p_c.ok_or_else(|| de::Error::missing_field("p_c"))?,
                    c: c.ok_or_else(|| de::Error::missing_field("c"))?,
                    delta: delta.ok_or_else(|| de::Error::missing_field("Delta"))?,
                    lambda: lambda.ok_or_else(|| de::Error::missing_field("lambda"))?,
                })
            }
        }
        deserializer.deserialize_map(V)
    }
}
