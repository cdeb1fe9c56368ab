//! Concrete finite-dimensional modules for the ambient quantized enveloping
//! algebra: the vector representation, tensor powers through the
//! comultiplication, extraction of irreducible constituents, expression
//! evaluation, and classical limits at q = 1.

use crate::cartan::{AmbientType, LatticeVec};
use crate::freealg::{Gen, GenExpr};
use crate::linalg::{
    self, kernel, restrict_to_span, simultaneous_eigenbasis, ExactMatrix, SparseVec,
};
use crate::report::{RelationCheck, RelationReport};
use crate::scalar::{LimitValue, QScalar};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RepError {
    #[error("no matrix for generator {0} on this module")]
    MissingGenerator(String),
    #[error("module construction failed: {0}")]
    Construction(String),
    #[error("entry ({row},{col}) = {value} is not regular at q=1")]
    NotIntegral {
        row: usize,
        col: usize,
        value: String,
    },
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
}

/// Anything that can evaluate named generators to exact matrices.
pub trait GenSource {
    fn dim(&self) -> usize;
    fn gen_matrix(&self, g: &Gen) -> Result<ExactMatrix, RepError>;
}

/// Evaluate an expression through the structural homomorphism into matrices.
pub fn evaluate(x: &GenExpr, src: &dyn GenSource) -> Result<ExactMatrix, RepError> {
    let n = src.dim();
    Ok(match x {
        GenExpr::Gen(g) => src.gen_matrix(g)?,
        GenExpr::DividedPower { gen, n: p, inv_fact } => {
            let m = src.gen_matrix(gen)?;
            let mut acc = ExactMatrix::identity(n);
            for _ in 0..*p {
                acc = acc.mul(&m);
            }
            acc.scale(inv_fact)
        }
        GenExpr::Scaled(c, inner) => evaluate(inner, src)?.scale(c),
        GenExpr::Sum(parts) => {
            let mut acc = ExactMatrix::zero(n, n);
            for p in parts {
                acc = acc.add(&evaluate(p, src)?);
            }
            acc
        }
        GenExpr::Prod(parts) => {
            let mut acc = ExactMatrix::identity(n);
            for p in parts {
                acc = acc.mul(&evaluate(p, src)?);
            }
            acc
        }
    })
}

/// A finite-dimensional module: one exact matrix per Chevalley generator,
/// K matrices diagonal and invertible in the stored basis.
#[derive(Clone, Debug)]
pub struct ModuleRep {
    pub ambient: AmbientType,
    dim: usize,
    /// e[i-1], f[i-1], k[i-1] for vertex i.
    e: Vec<ExactMatrix>,
    f: Vec<ExactMatrix>,
    k: Vec<ExactMatrix>,
    pub basis_labels: Vec<String>,
    pub provenance: String,
    /// Highest weight label when the module is a known constituent.
    pub lambda: Option<Vec<i64>>,
}

impl GenSource for ModuleRep {
    fn dim(&self) -> usize {
        self.dim
    }

    fn gen_matrix(&self, g: &Gen) -> Result<ExactMatrix, RepError> {
        match g {
            Gen::E(i) => self
                .e
                .get(i - 1)
                .cloned()
                .ok_or_else(|| RepError::MissingGenerator(format!("E{i}"))),
            Gen::F(i) => self
                .f
                .get(i - 1)
                .cloned()
                .ok_or_else(|| RepError::MissingGenerator(format!("F{i}"))),
            Gen::K(alpha) => self.k_alpha_matrix(alpha),
            Gen::B(i) => Err(RepError::MissingGenerator(format!(
                "B{i} (coideal generator on a plain module)"
            ))),
        }
    }
}

impl ModuleRep {
    /// Assemble a module from generator matrices, checking shapes and that
    /// the K matrices are invertible diagonals.
    pub fn from_matrices(
        ambient: AmbientType,
        e: Vec<ExactMatrix>,
        f: Vec<ExactMatrix>,
        k: Vec<ExactMatrix>,
        provenance: impl Into<String>,
    ) -> Result<Self, RepError> {
        let n = ambient.rank();
        if e.len() != n || f.len() != n || k.len() != n {
            return Err(RepError::Construction(
                "generator count does not match the diagram rank".into(),
            ));
        }
        let dim = k
            .first()
            .map(ExactMatrix::rows)
            .ok_or_else(|| RepError::Construction("rank zero module".into()))?;
        for m in e.iter().chain(&f).chain(&k) {
            if m.rows() != dim || m.cols() != dim {
                return Err(RepError::Construction("generator shape mismatch".into()));
            }
        }
        for (i, m) in k.iter().enumerate() {
            if !m.is_diagonal() {
                return Err(RepError::Construction(format!(
                    "K{} is not diagonal",
                    i + 1
                )));
            }
            for d in 0..dim {
                if m.get(d, d).is_zero() {
                    return Err(RepError::Construction(format!("K{} is singular", i + 1)));
                }
            }
        }
        Ok(ModuleRep {
            ambient,
            dim,
            e,
            f,
            k,
            basis_labels: (0..dim).map(|i| format!("b{i}")).collect(),
            provenance: provenance.into(),
            lambda: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.k.len()
    }

    pub fn e_mat(&self, i: usize) -> &ExactMatrix {
        &self.e[i - 1]
    }

    pub fn f_mat(&self, i: usize) -> &ExactMatrix {
        &self.f[i - 1]
    }

    pub fn k_mat(&self, i: usize) -> &ExactMatrix {
        &self.k[i - 1]
    }

    /// K_alpha as a diagonal matrix.
    pub fn k_alpha_matrix(&self, alpha: &LatticeVec) -> Result<ExactMatrix, RepError> {
        if alpha.len() != self.k.len() {
            return Err(RepError::MissingGenerator(
                "lattice vector of wrong rank".into(),
            ));
        }
        let mut diag = vec![QScalar::one(); self.dim];
        for (idx, &c) in alpha.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (d, val) in diag.iter_mut().enumerate() {
                let entry = self.k[idx].get(d, d);
                *val = &*val * &entry.pow(c);
            }
        }
        Ok(ExactMatrix::diagonal(diag))
    }

    /// q-exponent weights of the basis vectors: weights()[d][i-1] = m with
    /// K_i-eigenvalue sign * q^{d_i m} on basis vector d.
    pub fn weights(&self) -> Result<Vec<Vec<i64>>, RepError> {
        let sym = symmetrizer_list(&self.ambient);
        let mut out = vec![vec![0i64; self.k.len()]; self.dim];
        for (i, km) in self.k.iter().enumerate() {
            for d in 0..self.dim {
                let ev = km.get(d, d);
                let (_, spow) = ev.as_signed_s_power().ok_or_else(|| {
                    RepError::Construction(format!(
                        "K{}-eigenvalue {} is not a signed q-power",
                        i + 1,
                        ev
                    ))
                })?;
                let di = 2 * sym[i];
                if spow % di != 0 {
                    return Err(RepError::Construction(format!(
                        "K{}-eigenvalue exponent not divisible by d_i",
                        i + 1
                    )));
                }
                out[d][i] = spow / di;
            }
        }
        Ok(out)
    }
}

pub(crate) fn symmetrizer_list(ambient: &AmbientType) -> Vec<i64> {
    match ambient {
        AmbientType::A(n) => vec![1; *n],
        AmbientType::B(n) => {
            let mut d = vec![2; *n];
            d[*n - 1] = 1;
            d
        }
        AmbientType::C(n) => {
            let mut d = vec![1; *n];
            d[*n - 1] = 2;
            d
        }
        AmbientType::D(n) => vec![1; *n],
        AmbientType::E(n) => vec![1; *n],
        AmbientType::F4 => vec![2, 2, 1, 1],
        AmbientType::G2 => vec![1, 3],
    }
}

/// The defining n-dimensional module of quantum sl_n in its weight basis.
pub fn vector_rep(n: usize) -> ModuleRep {
    assert!(n >= 2, "vector_rep needs rank >= 2");
    let verts = n - 1;
    let dim = n;
    let mut e = Vec::with_capacity(verts);
    let mut f = Vec::with_capacity(verts);
    let mut k = Vec::with_capacity(verts);
    for i in 1..=verts {
        // E_i v_{i+1} = v_i, F_i v_i = v_{i+1}.
        e.push(ExactMatrix::from_entries(
            dim,
            dim,
            [(i - 1, i, QScalar::one())],
        ));
        f.push(ExactMatrix::from_entries(
            dim,
            dim,
            [(i, i - 1, QScalar::one())],
        ));
        let mut diag = vec![QScalar::one(); dim];
        diag[i - 1] = QScalar::q_power(1);
        diag[i] = QScalar::q_power(-1);
        k.push(ExactMatrix::diagonal(diag));
    }
    ModuleRep {
        ambient: AmbientType::A(verts),
        dim,
        e,
        f,
        k,
        basis_labels: (1..=dim).map(|i| format!("v{i}")).collect(),
        provenance: "V".into(),
        lambda: None,
    }
}

/// One-dimensional sign module for rank one: E = F = 0, K = sign.
pub fn sign_module(sign: i64) -> ModuleRep {
    assert!(sign == 1 || sign == -1);
    ModuleRep {
        ambient: AmbientType::A(1),
        dim: 1,
        e: vec![ExactMatrix::zero(1, 1)],
        f: vec![ExactMatrix::zero(1, 1)],
        k: vec![ExactMatrix::diagonal(vec![QScalar::from_int(sign)])],
        basis_labels: vec!["1".into()],
        provenance: if sign == 1 { "K+" } else { "K-" }.into(),
        lambda: None,
    }
}

/// One-dimensional trivial module over any ambient diagram.
pub fn trivial_module(ambient: AmbientType) -> ModuleRep {
    let verts = ambient.rank();
    ModuleRep {
        ambient,
        dim: 1,
        e: vec![ExactMatrix::zero(1, 1); verts],
        f: vec![ExactMatrix::zero(1, 1); verts],
        k: vec![ExactMatrix::identity(1); verts],
        basis_labels: vec!["1".into()],
        provenance: "1".into(),
        lambda: None,
    }
}

/// Tensor product through the comultiplication:
/// E -> E (x) 1 + K (x) E, F -> 1 (x) F + F (x) K^{-1}, K -> K (x) K.
pub fn tensor(m: &ModuleRep, n: &ModuleRep) -> Result<ModuleRep, RepError> {
    if m.ambient != n.ambient {
        return Err(RepError::Construction(
            "tensor factors over different diagrams".into(),
        ));
    }
    let verts = m.k.len();
    let im = ExactMatrix::identity(m.dim);
    let inn = ExactMatrix::identity(n.dim);
    let mut e = Vec::with_capacity(verts);
    let mut f = Vec::with_capacity(verts);
    let mut k = Vec::with_capacity(verts);
    for i in 0..verts {
        let kinv = linalg::invert(&n.k[i])?;
        e.push(m.e[i].kron(&inn).add(&m.k[i].kron(&n.e[i])));
        f.push(im.kron(&n.f[i]).add(&m.f[i].kron(&kinv)));
        k.push(m.k[i].kron(&n.k[i]));
    }
    let mut basis_labels = Vec::with_capacity(m.dim * n.dim);
    for a in &m.basis_labels {
        for b in &n.basis_labels {
            basis_labels.push(format!("{a}(x){b}"));
        }
    }
    Ok(ModuleRep {
        ambient: m.ambient,
        dim: m.dim * n.dim,
        e,
        f,
        k,
        basis_labels,
        provenance: format!("{}(x){}", m.provenance, n.provenance),
        lambda: None,
    })
}

/// Tensor power of the vector representation, with optional sign factor
/// (rank one only for the sign twist).
pub fn tensor_word(n: usize, copies: usize, sign: Option<i64>) -> Result<ModuleRep, RepError> {
    let v = vector_rep(n);
    let mut acc = if copies == 0 {
        trivial_module(v.ambient)
    } else {
        v.clone()
    };
    for _ in 1..copies.max(1) {
        acc = tensor(&acc, &v)?;
    }
    if let Some(s) = sign {
        acc = tensor(&acc, &sign_module(s))?;
    }
    Ok(acc)
}

/// Every defining relation of the ambient presentation, checked exactly.
pub fn verify_ambient_presentation(m: &ModuleRep) -> Result<RelationReport, RepError> {
    let mut report = RelationReport::new(format!(
        "ambient presentation on {} (dim {})",
        m.provenance, m.dim
    ));
    let cartan = m.ambient.cartan_matrix();
    let sym = symmetrizer_list(&m.ambient);
    let verts = m.k.len();
    let id = ExactMatrix::identity(m.dim);
    for i in 1..=verts {
        let ki = m.k_mat(i);
        let kinv = linalg::invert(ki)?;
        report.push(RelationCheck::from_residual(
            format!("KKinv({i})"),
            format!("K{i}*K{i}^-1 = 1"),
            &ki.mul(&kinv).sub(&id),
        ));
        for j in 1..=verts {
            let a = cartan[i - 1][j - 1];
            let di = sym[i - 1];
            if i < j {
                report.push(RelationCheck::from_residual(
                    format!("KK({i},{j})"),
                    format!("K{i}*K{j} = K{j}*K{i}"),
                    &m.k_mat(i).commutator(m.k_mat(j)),
                ));
            }
            let lhs = ki.mul(m.e_mat(j));
            let rhs = m.e_mat(j).mul(ki).scale(&QScalar::q_power(di * a));
            report.push(RelationCheck::from_residual(
                format!("KE({i},{j})"),
                format!("K{i}*E{j} = q{i}^({a})*E{j}*K{i}"),
                &lhs.sub(&rhs),
            ));
            let lhs = ki.mul(m.f_mat(j));
            let rhs = m.f_mat(j).mul(ki).scale(&QScalar::q_power(-di * a));
            report.push(RelationCheck::from_residual(
                format!("KF({i},{j})"),
                format!("K{i}*F{j} = q{i}^({})*F{j}*K{i}", -a),
                &lhs.sub(&rhs),
            ));
            let comm = m.e_mat(i).commutator(m.f_mat(j));
            let rhs = if i == j {
                let denom = (&QScalar::q_power(di) - &QScalar::q_power(-di))
                    .inv()
                    .unwrap();
                ki.sub(&kinv).scale(&denom)
            } else {
                ExactMatrix::zero(m.dim, m.dim)
            };
            report.push(RelationCheck::from_residual(
                format!("EF({i},{j})"),
                format!("[E{i},F{j}] = delta*[K{i};0]"),
                &comm.sub(&rhs),
            ));
            if i != j {
                let se = serre_matrix(m, i, j, true, a, di);
                report.push(RelationCheck::from_residual(
                    format!("SerreE({i},{j})"),
                    format!("S_({i},{j})(E{i},E{j}) = 0"),
                    &se,
                ));
                let sf = serre_matrix(m, i, j, false, a, di);
                report.push(RelationCheck::from_residual(
                    format!("SerreF({i},{j})"),
                    format!("S_({i},{j})(F{i},F{j}) = 0"),
                    &sf,
                ));
            }
        }
    }
    Ok(report)
}

fn serre_matrix(m: &ModuleRep, i: usize, j: usize, use_e: bool, a: i64, di: i64) -> ExactMatrix {
    let x = if use_e { m.e_mat(i) } else { m.f_mat(i) };
    let y = if use_e { m.e_mat(j) } else { m.f_mat(j) };
    let top = 1 - a;
    let mut acc = ExactMatrix::zero(m.dim(), m.dim());
    for r in 0..=top {
        let coeff = crate::scalar::qbinom(top, r, di).expect("in range");
        let sign = if r % 2 == 0 { 1 } else { -1 };
        let mut term = ExactMatrix::identity(m.dim());
        for _ in 0..(top - r) {
            term = term.mul(x);
        }
        term = term.mul(y);
        for _ in 0..r {
            term = term.mul(x);
        }
        acc = acc.add(&term.scale(&(&QScalar::from_int(sign) * &coeff)));
    }
    acc
}

/// Basis of the joint kernel of all raising operators, refined into joint
/// K-eigenvectors, each with its q-exponent weight, sorted by decreasing
/// lexicographic weight.
pub fn highest_weight_vectors(m: &ModuleRep) -> Result<Vec<(SparseVec, Vec<i64>)>, RepError> {
    let stacked: Vec<&ExactMatrix> = m.e.iter().collect();
    let stacked = ExactMatrix::vstack(&stacked);
    let ker = kernel(&stacked);
    if ker.is_empty() {
        return Ok(Vec::new());
    }
    let basis = ExactMatrix::from_columns(m.dim, &ker);
    let mut family = Vec::new();
    let mut candidates = Vec::new();
    for km in &m.k {
        let restricted = restrict_to_span(km, &basis)?;
        let mut cands: Vec<QScalar> = Vec::new();
        for d in 0..m.dim {
            let v = km.get(d, d);
            if !cands.contains(&v) {
                cands.push(v);
            }
        }
        family.push(restricted);
        candidates.push(cands);
    }
    let (blocks, complete) = simultaneous_eigenbasis(&family, &candidates)?;
    if !complete {
        return Err(RepError::Construction(
            "kernel did not split into K-eigenvectors".into(),
        ));
    }
    let sym = symmetrizer_list(&m.ambient);
    let mut out = Vec::new();
    for block in blocks {
        let mut weight = vec![0i64; m.k.len()];
        for (i, ev) in block.eigenvalues.iter().enumerate() {
            let (_, spow) = ev.as_signed_s_power().ok_or_else(|| {
                RepError::Construction(format!("K-eigenvalue {ev} is not a signed q-power"))
            })?;
            weight[i] = spow / (2 * sym[i]);
        }
        for v in block.basis {
            // Lift kernel coordinates back to ambient coordinates.
            let mut amb = SparseVec::new();
            for (&kidx, c) in &v {
                for (&row, b) in &ker[kidx] {
                    let t = c * b;
                    if t.is_zero() {
                        continue;
                    }
                    let cur = amb.remove(&row).unwrap_or_else(QScalar::zero);
                    let nv = &cur + &t;
                    if !nv.is_zero() {
                        amb.insert(row, nv);
                    }
                }
            }
            out.push((amb, weight.clone()));
        }
    }
    out.sort_by(|a, b| b.1.cmp(&a.1));
    Ok(out)
}

/// Split a semisimple module into highest-weight constituents: for each
/// highest-weight vector, the lowering-closure submodule, relabeled.
pub fn constituents(m: &ModuleRep) -> Result<Vec<ModuleRep>, RepError> {
    let hws = highest_weight_vectors(m)?;
    let mut parts = Vec::new();
    let mut total = 0usize;
    for (v, weight) in hws {
        let closure = f_closure(m, &v);
        total += closure.len();
        let basis = ExactMatrix::from_columns(m.dim, &closure);
        let mut e = Vec::new();
        let mut f = Vec::new();
        let mut k = Vec::new();
        for i in 1..=m.k.len() {
            e.push(restrict_to_span(m.e_mat(i), &basis)?);
            f.push(restrict_to_span(m.f_mat(i), &basis)?);
            k.push(restrict_to_span(m.k_mat(i), &basis)?);
        }
        for (i, km) in k.iter().enumerate() {
            if !km.is_diagonal() {
                return Err(RepError::Construction(format!(
                    "restricted K{} is not diagonal",
                    i + 1
                )));
            }
        }
        let label: Vec<String> = weight.iter().map(|c| c.to_string()).collect();
        parts.push(ModuleRep {
            ambient: m.ambient,
            dim: closure.len(),
            e,
            f,
            k,
            basis_labels: (0..closure.len()).map(|i| format!("w{i}")).collect(),
            provenance: format!("V({}) in {}", label.join(","), m.provenance),
            lambda: Some(weight),
        });
    }
    if total != m.dim {
        return Err(RepError::Construction(format!(
            "constituent dimensions sum to {total}, expected {}",
            m.dim
        )));
    }
    Ok(parts)
}

/// Breadth-first lowering-operator closure of a vector; the returned vectors
/// are a basis of the generated submodule in insertion order.
fn f_closure(m: &ModuleRep, v: &SparseVec) -> Vec<SparseVec> {
    let mut vectors = vec![v.clone()];
    let mut frontier = vec![v.clone()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for w in &frontier {
            for i in 1..=m.k.len() {
                let img = m.f_mat(i).apply(w);
                if img.is_empty() {
                    continue;
                }
                let mut cols = vectors.clone();
                cols.push(img.clone());
                let test = ExactMatrix::from_columns(m.dim, &cols);
                if linalg::rank(&test) > vectors.len() {
                    vectors.push(img.clone());
                    next.push(img);
                }
            }
        }
        frontier = next;
    }
    vectors
}

/// Classical limits of the generator matrices with named extras.
#[derive(Clone, Debug)]
pub struct ClassicalRep {
    pub ambient: AmbientType,
    pub dim: usize,
    pub e: Vec<ExactMatrix>,
    pub f: Vec<ExactMatrix>,
    pub h: Vec<ExactMatrix>,
    /// Entry-wise limits of the requested extra matrices, by name.
    pub extras: BTreeMap<String, ExactMatrix>,
}

/// Entry-wise limit of a matrix; the offending entry is reported on a pole.
pub fn limit_matrix(m: &ExactMatrix) -> Result<ExactMatrix, RepError> {
    m.map_entries(|r, c, v| match v.limit_at_one() {
        LimitValue::Finite(x) => Ok(QScalar::from_big_rational(&x)),
        LimitValue::Pole => Err(RepError::NotIntegral {
            row: r,
            col: c,
            value: v.to_string(),
        }),
    })
}

/// Take q -> 1 on a module: e_i, f_i from E_i, F_i, h_i from (K_i; 0)_{q_i},
/// plus entry-wise limits of any named extras.
pub fn classical_limit(
    m: &ModuleRep,
    extras: &[(String, ExactMatrix)],
) -> Result<ClassicalRep, RepError> {
    let sym = symmetrizer_list(&m.ambient);
    let mut e = Vec::new();
    let mut f = Vec::new();
    let mut h = Vec::new();
    for i in 1..=m.k.len() {
        e.push(limit_matrix(m.e_mat(i))?);
        f.push(limit_matrix(m.f_mat(i))?);
        // (K_i; 0)_{q_i} = (K_i - 1) / (q_i - 1).
        let denom = (&QScalar::q_power(sym[i - 1]) - &QScalar::one())
            .inv()
            .unwrap();
        let hk = m.k_mat(i).sub(&ExactMatrix::identity(m.dim)).scale(&denom);
        h.push(limit_matrix(&hk)?);
        // K_i itself must also be regular at q = 1.
        limit_matrix(m.k_mat(i))?;
    }
    let mut ex = BTreeMap::new();
    for (name, mat) in extras {
        ex.insert(name.clone(), limit_matrix(mat)?);
    }
    Ok(ClassicalRep {
        ambient: m.ambient,
        dim: m.dim,
        e,
        f,
        h,
        extras: ex,
    })
}

/// Chevalley-Serre relation suite over Q at q = 1.
pub fn verify_classical_presentation(c: &ClassicalRep) -> RelationReport {
    let mut report = RelationReport::new("classical presentation at q=1");
    let cartan = c.ambient.cartan_matrix();
    let verts = c.e.len();
    for i in 1..=verts {
        for j in 1..=verts {
            let a = cartan[i - 1][j - 1];
            if i < j {
                report.push(RelationCheck::from_residual(
                    format!("hh({i},{j})"),
                    format!("[h{i},h{j}] = 0"),
                    &c.h[i - 1].commutator(&c.h[j - 1]),
                ));
            }
            report.push(RelationCheck::from_residual(
                format!("he({i},{j})"),
                format!("[h{i},e{j}] = {a}*e{j}"),
                &c.h[i - 1]
                    .commutator(&c.e[j - 1])
                    .sub(&c.e[j - 1].scale(&QScalar::from_int(a))),
            ));
            report.push(RelationCheck::from_residual(
                format!("hf({i},{j})"),
                format!("[h{i},f{j}] = {}*f{j}", -a),
                &c.h[i - 1]
                    .commutator(&c.f[j - 1])
                    .sub(&c.f[j - 1].scale(&QScalar::from_int(-a))),
            ));
            let rhs = if i == j {
                c.h[i - 1].clone()
            } else {
                ExactMatrix::zero(c.dim, c.dim)
            };
            report.push(RelationCheck::from_residual(
                format!("ef({i},{j})"),
                format!("[e{i},f{j}] = delta*h{i}"),
                &c.e[i - 1].commutator(&c.f[j - 1]).sub(&rhs),
            ));
            if i != j {
                let mut ade = c.e[j - 1].clone();
                let mut adf = c.f[j - 1].clone();
                for _ in 0..(1 - a) {
                    ade = c.e[i - 1].commutator(&ade);
                    adf = c.f[i - 1].commutator(&adf);
                }
                report.push(RelationCheck::from_residual(
                    format!("adSerreE({i},{j})"),
                    format!("ad(e{i})^{}(e{j}) = 0", 1 - a),
                    &ade,
                ));
                report.push(RelationCheck::from_residual(
                    format!("adSerreF({i},{j})"),
                    format!("ad(f{i})^{}(f{j}) = 0", 1 - a),
                    &adf,
                ));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{satake, Family};
    use crate::freealg::{b_generator, serre, IParams};

    #[test]
    fn sl2_vector_rep_action() {
        let v = vector_rep(2);
        // E v_- = v_+, F v_+ = v_-, K v_+- = q^{+-1} v_+-.
        assert_eq!(v.e_mat(1).get(0, 1), QScalar::one());
        assert_eq!(v.f_mat(1).get(1, 0), QScalar::one());
        assert_eq!(v.k_mat(1).get(0, 0), QScalar::q_power(1));
        assert_eq!(v.k_mat(1).get(1, 1), QScalar::q_power(-1));
        assert!(verify_ambient_presentation(&v).unwrap().all_pass());
    }

    #[test]
    fn sign_module_action() {
        let s = sign_module(-1);
        assert_eq!(s.k_mat(1).get(0, 0), QScalar::from_int(-1));
        let v = vector_rep(2);
        let vs = tensor(&v, &sign_module(1)).unwrap();
        // V (x) K+ acts exactly like V.
        assert_eq!(vs.e_mat(1), v.e_mat(1));
        assert_eq!(vs.k_mat(1), v.k_mat(1));
    }

    #[test]
    fn presentation_on_small_grid() {
        for n in [3usize, 4] {
            let v = vector_rep(n);
            assert!(verify_ambient_presentation(&v).unwrap().all_pass());
            let vv = tensor(&v, &v).unwrap();
            assert!(verify_ambient_presentation(&vv).unwrap().all_pass());
        }
    }

    #[test]
    fn tensor_matches_hand_kron() {
        let v = vector_rep(2);
        let vv = tensor(&v, &v).unwrap();
        let id = ExactMatrix::identity(2);
        let expected = v.e_mat(1).kron(&id).add(&v.k_mat(1).kron(v.e_mat(1)));
        assert_eq!(vv.e_mat(1), &expected);
        // Coassociativity: (V(x)V)(x)V = V(x)(V(x)V) as matrices.
        let a = tensor(&vv, &v).unwrap();
        let b = tensor(&v, &vv).unwrap();
        assert_eq!(a.e_mat(1), b.e_mat(1));
        assert_eq!(a.f_mat(1), b.f_mat(1));
        assert_eq!(a.k_mat(1), b.k_mat(1));
    }

    #[test]
    fn hw_vectors_small() {
        let v = vector_rep(2);
        let hw = highest_weight_vectors(&v).unwrap();
        assert_eq!(hw.len(), 1);
        assert_eq!(hw[0].1, vec![1]);

        let vv = tensor(&v, &v).unwrap();
        let hw = highest_weight_vectors(&vv).unwrap();
        let weights: Vec<Vec<i64>> = hw.iter().map(|(_, w)| w.clone()).collect();
        assert_eq!(weights, vec![vec![2], vec![0]]);

        let v3 = vector_rep(3);
        let vvv = tensor(&tensor(&v3, &v3).unwrap(), &v3).unwrap();
        let hw = highest_weight_vectors(&vvv).unwrap();
        let weights: Vec<Vec<i64>> = hw.iter().map(|(_, w)| w.clone()).collect();
        assert_eq!(weights, vec![vec![3, 0], vec![1, 1], vec![1, 1], vec![0, 0]]);
    }

    #[test]
    fn constituents_dims() {
        let v = vector_rep(2);
        let vv = tensor(&v, &v).unwrap();
        let parts = constituents(&vv).unwrap();
        let dims: Vec<usize> = parts.iter().map(ModuleRep::dim).collect();
        assert_eq!(dims, vec![3, 1]);

        let v3 = vector_rep(3);
        let vv3 = tensor(&v3, &v3).unwrap();
        let dims: Vec<usize> = constituents(&vv3)
            .unwrap()
            .iter()
            .map(ModuleRep::dim)
            .collect();
        assert_eq!(dims, vec![6, 3]);

        let solo = constituents(&v).unwrap();
        assert_eq!(solo.len(), 1);
        assert_eq!(solo[0].dim(), 2);
        for p in constituents(&vv3).unwrap() {
            assert!(verify_ambient_presentation(&p).unwrap().all_pass());
        }
    }

    #[test]
    fn evaluate_examples() {
        let d = satake(Family::AI2 { r: 2 }).unwrap();
        let v = vector_rep(3);
        // K_{a1+a2} = K_1 K_2 as diagonal matrices.
        let prod = v.k_mat(1).mul(v.k_mat(2));
        let ka = evaluate(&GenExpr::k_alpha(vec![1, 1]), &v).unwrap();
        assert_eq!(ka, prod);
        // Serre element on E's evaluates to zero.
        let s = serre(&d, 1, 2, &GenExpr::e(1), &GenExpr::e(2));
        assert!(evaluate(&s, &v).unwrap().is_zero());
        // [E1, F1] = [K1;0] on V (x) V at rank one.
        let v2 = vector_rep(2);
        let vv = tensor(&v2, &v2).unwrap();
        let lhs = evaluate(
            &crate::freealg::qcomm(&GenExpr::e(1), &GenExpr::f(1), 0),
            &vv,
        )
        .unwrap();
        let rhs = evaluate(&crate::freealg::k_bracket(&vec![1], 0, 1), &vv).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn classical_limits() {
        let v = vector_rep(2);
        let c = classical_limit(&v, &[]).unwrap();
        // h_1 = diag(1, -1).
        assert_eq!(c.h[0].get(0, 0), QScalar::one());
        assert_eq!(c.h[0].get(1, 1), QScalar::from_int(-1));
        assert!(verify_classical_presentation(&c).all_pass());

        // B_1 for the split rank-one datum at varsigma = q^-1 limits to
        // [[0,1],[1,0]].
        let d = satake(Family::AI2 { r: 1 }).unwrap();
        let p = IParams::qi_inverse(&d);
        let b = b_generator(&d, &p, 1).unwrap();
        let bm = evaluate(&b, &v).unwrap();
        let bl = limit_matrix(&bm).unwrap();
        assert_eq!(bl.get(0, 1), QScalar::one());
        assert_eq!(bl.get(1, 0), QScalar::one());
        assert!(bl.get(0, 0).is_zero());

        // A genuine pole is reported with the offending entry.
        let pole = ExactMatrix::from_entries(
            1,
            1,
            [(
                0,
                0,
                &QScalar::one() / &(&QScalar::q_power(1) - &QScalar::one()),
            )],
        );
        match limit_matrix(&pole) {
            Err(RepError::NotIntegral { row: 0, col: 0, .. }) => {}
            other => panic!("expected NotIntegral, got {other:?}"),
        }
    }

    #[test]
    fn type_a_guard() {
        let v = vector_rep(4);
        assert_eq!(v.ambient, AmbientType::A(3));
        assert!(v.gen_matrix(&Gen::B(1)).is_err());
    }

    #[test]
    fn braid_automorphism_roundtrip_and_braid_law() {
        use crate::freealg::{lusztig_t, Direction};
        let d = satake(Family::AI2 { r: 2 }).unwrap();
        let v = vector_rep(4);
        let gens = [
            GenExpr::e(1),
            GenExpr::e(2),
            GenExpr::f(1),
            GenExpr::f(3),
            GenExpr::k_alpha(vec![1, -1, 0]),
        ];
        for g in &gens {
            for i in 1..=3usize {
                let fwd = lusztig_t(&d, i, g, Direction::Forward).unwrap();
                let back = lusztig_t(&d, i, &fwd, Direction::Inverse).unwrap();
                assert_eq!(
                    evaluate(&back, &v).unwrap(),
                    evaluate(g, &v).unwrap(),
                    "roundtrip failed at {g} vertex {i}"
                );
                let bwd = lusztig_t(&d, i, g, Direction::Inverse).unwrap();
                let fwd2 = lusztig_t(&d, i, &bwd, Direction::Forward).unwrap();
                assert_eq!(evaluate(&fwd2, &v).unwrap(), evaluate(g, &v).unwrap());
            }
        }
        // T1 T2 T1 = T2 T1 T2 as operators, checked on generator images.
        let braid = |word: &[usize], x: &GenExpr| {
            let mut acc = x.clone();
            for &i in word.iter().rev() {
                acc = lusztig_t(&d, i, &acc, Direction::Forward).unwrap();
            }
            evaluate(&acc, &v).unwrap()
        };
        for g in &gens {
            assert_eq!(braid(&[1, 2, 1], g), braid(&[2, 1, 2], g));
        }
    }

    #[test]
    fn constituent_weights_match_classical_character() {
        use crate::hwt::oracle::RootSystem;
        let v3 = vector_rep(3);
        let vvv = tensor(&tensor(&v3, &v3).unwrap(), &v3).unwrap();
        let adjoint = constituents(&vvv)
            .unwrap()
            .into_iter()
            .find(|m| m.lambda.as_deref() == Some(&[1, 1]))
            .unwrap();
        let mut got: Vec<Vec<i64>> = adjoint.weights().unwrap();
        got.sort();
        let system = RootSystem::new(AmbientType::A(2).cartan_matrix());
        let mut expected = Vec::new();
        for (mu, mult) in system.weight_multiplicities(&[1, 1]) {
            let row: Vec<i64> = mu
                .iter()
                .map(|c| i64::try_from(c.num.clone()).unwrap())
                .collect();
            let m: u64 = mult.try_into().unwrap();
            for _ in 0..m {
                expected.push(row.clone());
            }
        }
        expected.sort();
        assert_eq!(got, expected);
    }
}
