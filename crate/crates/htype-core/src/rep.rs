//! Admissible modules: a scalar product of signature (dim_plus, dim_minus)
//! together with generator actions J_1..J_{r+s} realizing the Clifford
//! relations, each J a signed permutation of the chosen orthogonal basis.

use clifford_exact::Signature;
use serde::{Deserialize, Serialize};

use crate::linalg::SignedPerm;
use crate::HtypeError;

/// Which of the inequivalent minimal modules a representation realizes.
/// For most signatures the minimal module is unique up to equivalence; at
/// signatures r - s = 3 mod 4 with s even there are two, distinguished by
/// the sign with which the volume element acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Unique,
    Plus,
    Minus,
    /// A direct sum containing both volume classes, so the volume element
    /// acts as a non-scalar involution.
    Mixed,
}

impl Variant {
    pub fn volume_sign(self) -> Option<i8> {
        match self {
            Variant::Unique | Variant::Mixed => None,
            Variant::Plus => Some(1),
            Variant::Minus => Some(-1),
        }
    }
}

/// Definiteness class of the restriction of the module scalar product to
/// the distinguished common eigenspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EForm {
    #[serde(rename = "posdef")]
    PositiveDefinite,
    #[serde(rename = "negdef")]
    NegativeDefinite,
    Neutral,
}

impl EForm {
    pub fn is_definite(self) -> bool {
        !matches!(self, EForm::Neutral)
    }
}

/// A Clifford module over the generators of Cl(r, s), with an admissible
/// scalar product diag(eta) on the chosen basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    sig: Signature,
    eta: Vec<i8>,
    generators: Vec<SignedPerm>,
    variant: Variant,
    eplus: EForm,
}

impl Representation {
    pub fn new(
        sig: Signature,
        eta: Vec<i8>,
        generators: Vec<SignedPerm>,
        variant: Variant,
        eplus: EForm,
    ) -> Result<Self, HtypeError> {
        let rep = Representation {
            sig,
            eta,
            generators,
            variant,
            eplus,
        };
        rep.verify()?;
        Ok(rep)
    }

    /// Construct without running verification.  Callers inside the crate use
    /// this when the invariants hold by construction and are checked by the
    /// test suite; external data always goes through `new`.
    pub(crate) fn new_unchecked(
        sig: Signature,
        eta: Vec<i8>,
        generators: Vec<SignedPerm>,
        variant: Variant,
        eplus: EForm,
    ) -> Self {
        Representation {
            sig,
            eta,
            generators,
            variant,
            eplus,
        }
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    pub fn eta(&self) -> &[i8] {
        &self.eta
    }

    pub fn generators(&self) -> &[SignedPerm] {
        &self.generators
    }

    pub fn generator(&self, k: usize) -> &SignedPerm {
        &self.generators[k]
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn eplus(&self) -> EForm {
        self.eplus
    }

    pub(crate) fn set_eplus(&mut self, e: EForm) {
        self.eplus = e;
    }

    pub(crate) fn set_variant(&mut self, v: Variant) {
        self.variant = v;
    }

    /// Signature (positives, negatives) of the module scalar product.
    pub fn module_signature(&self) -> (usize, usize) {
        let pos = self.eta.iter().filter(|&&e| e > 0).count();
        (pos, self.eta.len() - pos)
    }

    /// Action of the volume element J_{z_1} ... J_{z_{r+s}}.
    pub fn volume_action(&self) -> SignedPerm {
        let mut acc = SignedPerm::identity(self.dim());
        for j in &self.generators {
            acc = acc.compose(j);
        }
        acc
    }

    /// Flip the sign of every generator.  For r + s odd this flips the sign
    /// of the volume action and so exchanges the two minimal variants.
    pub(crate) fn negate_generators(&mut self) {
        for j in self.generators.iter_mut() {
            *j = j.negate();
        }
        self.variant = match self.variant {
            Variant::Unique => Variant::Unique,
            Variant::Plus => Variant::Minus,
            Variant::Minus => Variant::Plus,
            Variant::Mixed => Variant::Mixed,
        };
    }

    /// Full structural verification:
    /// - generator count r + s, all of matching dimension;
    /// - eta entries +-1, neutral (equal counts) whenever s > 0;
    /// - Clifford relations J_i J_j + J_j J_i = -2 <z_i, z_j> Id;
    /// - admissibility: eta(J_k x, y) = -eta(x, J_k y);
    /// - the consequence J_k^tau J_k = <z_k, z_k> Id.
    pub fn verify(&self) -> Result<(), HtypeError> {
        let sig = self.sig;
        let n = self.dim();
        if n == 0 {
            return Err(HtypeError::InvalidModule("empty module".into()));
        }
        if self.generators.len() != (sig.r() + sig.s()) as usize {
            return Err(HtypeError::InvalidModule(format!(
                "expected {} generators, found {}",
                sig.r() + sig.s(),
                self.generators.len()
            )));
        }
        if self.eta.iter().any(|&e| e != 1 && e != -1) {
            return Err(HtypeError::InvalidModule(
                "scalar product entries must be +-1".into(),
            ));
        }
        // A minimal module is definite for s = 0 and neutral for s > 0.  Sums
        // may mix a module with its sign-flipped copy, so only neutrality for
        // s > 0 is a hard constraint: each summand contributes equal counts.
        let (pos, neg) = self.module_signature();
        if sig.s() > 0 && pos != neg {
            return Err(HtypeError::InvalidModule(format!(
                "scalar product must be neutral when s > 0, got ({pos}, {neg})"
            )));
        }
        for (k, jk) in self.generators.iter().enumerate() {
            if jk.dim() != n {
                return Err(HtypeError::InvalidModule(format!(
                    "generator {k} has dimension {} instead of {n}",
                    jk.dim()
                )));
            }
            // J_k^2 = -<z_k, z_k> Id
            let square = jk.compose(jk);
            let want = -sig.metric_sign(k as u32);
            if square.as_scalar() != Some(want as i8) {
                return Err(HtypeError::InvalidModule(format!(
                    "generator {k} squares to the wrong scalar"
                )));
            }
            // admissibility: eta J_k antisymmetric
            if !jk.antisymmetric_wrt(&self.eta) {
                return Err(HtypeError::InvalidModule(format!(
                    "generator {k} is not skew-adjoint for the scalar product"
                )));
            }
            // J_k^tau J_k = <z_k, z_k> Id follows; check it anyway since it
            // is the form the automorphism equations consume
            let tau = jk.form_adjoint(&self.eta);
            if tau.compose(jk).as_scalar() != Some(sig.metric_sign(k as u32) as i8) {
                return Err(HtypeError::InvalidModule(format!(
                    "generator {k} violates J^tau J = <z, z> Id"
                )));
            }
            for (l, jl) in self.generators.iter().enumerate().skip(k + 1) {
                let anti = jk.compose(jl) == jl.compose(jk).negate();
                if !anti {
                    return Err(HtypeError::InvalidModule(format!(
                        "generators {k} and {l} do not anticommute"
                    )));
                }
            }
        }
        if let Some(want) = self.variant.volume_sign() {
            let vol = self.volume_action();
            if vol.as_scalar() != Some(want) {
                return Err(HtypeError::InvalidModule(
                    "volume action does not match declared variant".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn to_wire(&self) -> RepWire {
        RepWire {
            r: self.sig.r() as u32,
            s: self.sig.s() as u32,
            dim: self.dim() as u32,
            eta: self.eta.clone(),
            generators: self
                .generators
                .iter()
                .map(|j| {
                    j.to_dense()
                        .into_iter()
                        .map(|row| row.into_iter().map(|x| x as i32).collect())
                        .collect()
                })
                .collect(),
            variant: self.variant,
            eplus: self.eplus,
        }
    }

    pub fn from_wire(wire: &RepWire) -> Result<Self, HtypeError> {
        let sig = Signature::new(wire.r, wire.s)
            .map_err(|e| HtypeError::InvalidModule(e.to_string()))?;
        if wire.eta.len() != wire.dim as usize {
            return Err(HtypeError::InvalidModule(
                "eta length does not match dim".into(),
            ));
        }
        let mut gens = Vec::with_capacity(wire.generators.len());
        for (k, g) in wire.generators.iter().enumerate() {
            let rows: Vec<Vec<i64>> = g
                .iter()
                .map(|row| row.iter().map(|&x| x as i64).collect())
                .collect();
            let sp = SignedPerm::from_dense(&rows).ok_or_else(|| {
                HtypeError::InvalidModule(format!(
                    "generator {k} is not a signed permutation matrix"
                ))
            })?;
            gens.push(sp);
        }
        Representation::new(sig, wire.eta.clone(), gens, wire.variant, wire.eplus)
    }
}

/// Serialization form: generators as dense matrices of -1/0/1 so the files
/// are readable and toolable without knowing the internal encoding.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepWire {
    pub r: u32,
    pub s: u32,
    pub dim: u32,
    pub eta: Vec<i8>,
    pub generators: Vec<Vec<Vec<i32>>>,
    pub variant: Variant,
    pub eplus: EForm,
}

/// Which module to build over Cl(r, s): how many copies of each of the two
/// minimal variants.  For signatures with a unique minimal module only `p`
/// is meaningful and `q` must be zero unless the scalar product on the
/// distinguished eigenspace is definite (then q counts copies carrying the
/// negated scalar product).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub p: u32,
    pub q: u32,
}

impl ModuleSpec {
    pub fn new(p: u32, q: u32) -> Result<Self, HtypeError> {
        if p == 0 && q == 0 {
            return Err(HtypeError::InvalidModule(
                "module must contain at least one minimal summand".into(),
            ));
        }
        Ok(ModuleSpec { p, q })
    }

    pub fn total(&self) -> u32 {
        self.p + self.q
    }
}

impl std::fmt::Display for ModuleSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}
