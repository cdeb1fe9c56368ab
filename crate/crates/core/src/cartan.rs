//! Marked-diagram data: the diagram table, Cartan matrices, symmetrizers,
//! the restricted lattice, and the distinguished vertex sets.
//!
//! Vertices are 1-based, matching the table numbering (including the
//! two-row numbering of the AIII family). Every constructed datum is
//! validated against the structural facts: the involution squares to the
//! identity and preserves the Cartan matrix, marked vertices are fixed,
//! pairwise disconnected, and disconnected from black vertices, the
//! symmetrizers satisfy d_i a_{ij} = d_j a_{ji}, and -w_bullet(alpha_i) =
//! alpha_{tau(i)} on black vertices.

use crate::scalar::{QScalar, Rational};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CartanError {
    #[error("unknown diagram family `{0}`")]
    UnknownFamily(String),
    #[error("invalid rank parameters for {family}: {reason}")]
    InvalidRank { family: String, reason: String },
    #[error("diagram datum failed validation: {0}")]
    Validation(String),
}

/// Ambient Dynkin type of the underlying diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AmbientType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    E(usize),
    F4,
    G2,
}

impl AmbientType {
    pub fn rank(&self) -> usize {
        match *self {
            AmbientType::A(n) | AmbientType::B(n) | AmbientType::C(n) | AmbientType::D(n) => n,
            AmbientType::E(n) => n,
            AmbientType::F4 => 4,
            AmbientType::G2 => 2,
        }
    }

    pub fn is_type_a(&self) -> bool {
        matches!(self, AmbientType::A(_))
    }

    /// Cartan matrix with a_{ij} = <h_i, alpha_j>, 0-based storage.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut a = vec![vec![0i64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let bond = |m: &mut Vec<Vec<i64>>, i: usize, j: usize, aij: i64, aji: i64| {
            m[i - 1][j - 1] = aij;
            m[j - 1][i - 1] = aji;
        };
        match *self {
            AmbientType::A(n) => {
                for i in 1..n {
                    bond(&mut a, i, i + 1, -1, -1);
                }
            }
            AmbientType::B(n) => {
                assert!(n >= 2);
                for i in 1..n - 1 {
                    bond(&mut a, i, i + 1, -1, -1);
                }
                // Vertex n is short: the short row carries -2.
                bond(&mut a, n - 1, n, -1, -2);
            }
            AmbientType::C(n) => {
                assert!(n >= 2);
                for i in 1..n - 1 {
                    bond(&mut a, i, i + 1, -1, -1);
                }
                // Vertex n is long.
                bond(&mut a, n - 1, n, -2, -1);
            }
            AmbientType::D(n) => {
                assert!(n >= 3);
                for i in 1..n - 2 {
                    bond(&mut a, i, i + 1, -1, -1);
                }
                bond(&mut a, n - 2, n - 1, -1, -1);
                bond(&mut a, n - 2, n, -1, -1);
            }
            AmbientType::E(n) => {
                assert!((6..=8).contains(&n));
                bond(&mut a, 1, 3, -1, -1);
                bond(&mut a, 3, 4, -1, -1);
                bond(&mut a, 2, 4, -1, -1);
                bond(&mut a, 4, 5, -1, -1);
                bond(&mut a, 5, 6, -1, -1);
                if n >= 7 {
                    bond(&mut a, 6, 7, -1, -1);
                }
                if n >= 8 {
                    bond(&mut a, 7, 8, -1, -1);
                }
            }
            AmbientType::F4 => {
                bond(&mut a, 1, 2, -1, -1);
                bond(&mut a, 2, 3, -1, -2);
                bond(&mut a, 3, 4, -1, -1);
            }
            AmbientType::G2 => {
                // Vertex 1 short, vertex 2 long.
                bond(&mut a, 1, 2, -3, -1);
            }
        }
        a
    }
}

/// Case tag with rank parameters, e.g. AI-1 at rank r.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    AI1 { r: usize },
    AI2 { r: usize },
    AII { r: usize },
    AIII { r: usize, s: usize },
    AIV { r: usize },
    BI1 { r: usize },
    BI2 { r: usize },
    BII1 { r: usize, s: usize },
    BII2 { r: usize, s: usize },
    CI { n: usize },
    CII { r: usize, s: usize },
    DI1 { r: usize },
    DI2 { r: usize },
    DI3 { r: usize, s: usize },
    DI4 { r: usize, s: usize },
    DII1 { r: usize },
    DII2 { r: usize },
    DIII1 { r: usize },
    DIII2 { r: usize },
    EI,
    EII,
    EIII,
    EIV,
    EV,
    EVI,
    EVII,
    EVIII,
    EIX,
    FI,
    FII,
    G,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::AI1 { r } => write!(f, "AI-1(r={r})"),
            Family::AI2 { r } => write!(f, "AI-2(r={r})"),
            Family::AII { r } => write!(f, "AII(r={r})"),
            Family::AIII { r, s } => write!(f, "AIII(r={r},s={s})"),
            Family::AIV { r } => write!(f, "AIV(r={r})"),
            Family::BI1 { r } => write!(f, "BI-1(r={r})"),
            Family::BI2 { r } => write!(f, "BI-2(r={r})"),
            Family::BII1 { r, s } => write!(f, "BII-1(r={r},s={s})"),
            Family::BII2 { r, s } => write!(f, "BII-2(r={r},s={s})"),
            Family::CI { n } => write!(f, "CI(n={n})"),
            Family::CII { r, s } => write!(f, "CII(r={r},s={s})"),
            Family::DI1 { r } => write!(f, "DI-1(r={r})"),
            Family::DI2 { r } => write!(f, "DI-2(r={r})"),
            Family::DI3 { r, s } => write!(f, "DI-3(r={r},s={s})"),
            Family::DI4 { r, s } => write!(f, "DI-4(r={r},s={s})"),
            Family::DII1 { r } => write!(f, "DII-1(r={r})"),
            Family::DII2 { r } => write!(f, "DII-2(r={r})"),
            Family::DIII1 { r } => write!(f, "DIII-1(r={r})"),
            Family::DIII2 { r } => write!(f, "DIII-2(r={r})"),
            Family::EI => write!(f, "EI"),
            Family::EII => write!(f, "EII"),
            Family::EIII => write!(f, "EIII"),
            Family::EIV => write!(f, "EIV"),
            Family::EV => write!(f, "EV"),
            Family::EVI => write!(f, "EVI"),
            Family::EVII => write!(f, "EVII"),
            Family::EVIII => write!(f, "EVIII"),
            Family::EIX => write!(f, "EIX"),
            Family::FI => write!(f, "FI"),
            Family::FII => write!(f, "FII"),
            Family::G => write!(f, "G"),
        }
    }
}

/// Element of the root lattice in simple-root coordinates, 0-based.
pub type LatticeVec = Vec<i64>;

/// A marked diagram: vertex sets, involution, Cartan data.
#[derive(Clone, Debug)]
pub struct SatakeDatum {
    pub family: Family,
    pub ambient: AmbientType,
    n: usize,
    i_bullet: BTreeSet<usize>,
    i_otimes: BTreeSet<usize>,
    /// tau[v-1] is the image of vertex v.
    tau_map: Vec<usize>,
    cartan: Vec<Vec<i64>>,
    d: Vec<i64>,
}

impl SatakeDatum {
    /// Number of vertices.
    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n
    }

    pub fn i_bullet(&self) -> &BTreeSet<usize> {
        &self.i_bullet
    }

    pub fn i_otimes(&self) -> &BTreeSet<usize> {
        &self.i_otimes
    }

    pub fn i_circ(&self) -> Vec<usize> {
        self.vertices()
            .filter(|v| !self.i_bullet.contains(v))
            .collect()
    }

    pub fn is_black(&self, v: usize) -> bool {
        self.i_bullet.contains(&v)
    }

    pub fn is_marked(&self, v: usize) -> bool {
        self.i_otimes.contains(&v)
    }

    pub fn tau(&self, v: usize) -> usize {
        self.tau_map[v - 1]
    }

    pub fn a(&self, i: usize, j: usize) -> i64 {
        self.cartan[i - 1][j - 1]
    }

    pub fn d(&self, i: usize) -> i64 {
        self.d[i - 1]
    }

    /// q_i = q^{d_i}.
    pub fn qi(&self, i: usize) -> QScalar {
        QScalar::q_power(self.d(i))
    }

    pub fn is_quasi_split(&self) -> bool {
        self.i_bullet.is_empty()
    }

    /// Simple root as a lattice vector.
    pub fn alpha(&self, i: usize) -> LatticeVec {
        let mut v = vec![0i64; self.n];
        v[i - 1] = 1;
        v
    }

    /// Symmetric form (alpha, alpha_i) = d_i a_{i,.} extended bilinearly.
    pub fn form(&self, alpha: &LatticeVec, i: usize) -> i64 {
        alpha
            .iter()
            .enumerate()
            .map(|(j, &c)| c * self.d[j] * self.cartan[j][i - 1])
            .sum()
    }

    /// Pairing <h_i, alpha> = sum_j c_j a_{i,j}.
    pub fn pairing(&self, i: usize, alpha: &LatticeVec) -> i64 {
        alpha
            .iter()
            .enumerate()
            .map(|(j, &c)| c * self.cartan[i - 1][j])
            .sum()
    }

    /// Simple reflection s_i on the root lattice.
    pub fn reflect(&self, i: usize, alpha: &LatticeVec) -> LatticeVec {
        let c = self.pairing(i, alpha);
        let mut out = alpha.clone();
        out[i - 1] -= c;
        out
    }

    /// Apply a reflection word as the composition s_{w[0]} s_{w[1]} ...
    /// (rightmost letter acts first).
    pub fn apply_word(&self, word: &[usize], alpha: &LatticeVec) -> LatticeVec {
        let mut v = alpha.clone();
        for &i in word.iter().rev() {
            v = self.reflect(i, &v);
        }
        v
    }

    /// Deterministic reduced word for the longest element of the black
    /// subsystem: repeated descent on the restricted dominant vector,
    /// smallest vertex first.
    pub fn w_bullet_word(&self) -> Vec<usize> {
        let bullets: Vec<usize> = self.i_bullet.iter().copied().collect();
        if bullets.is_empty() {
            return Vec::new();
        }
        // Fundamental coordinates v_j = <h_j, v> tracked on black vertices.
        let mut coords: Vec<i64> = vec![1; bullets.len()];
        let mut word = Vec::new();
        loop {
            let Some(k) = coords.iter().position(|&c| c > 0) else {
                break;
            };
            let i = bullets[k];
            word.push(i);
            let ci = coords[k];
            for (m, &j) in bullets.iter().enumerate() {
                coords[m] -= ci * self.cartan[j - 1][i - 1];
            }
        }
        word
    }

    /// Positive roots of the black subsystem, as ambient lattice vectors.
    pub fn bullet_positive_roots(&self) -> Vec<LatticeVec> {
        positive_roots_of_subset(self, &self.i_bullet)
    }

    /// The weight 2 rho_bullet (sum of positive black roots).
    pub fn two_rho_bullet(&self) -> LatticeVec {
        let mut acc = vec![0i64; self.n];
        for root in self.bullet_positive_roots() {
            for (a, b) in acc.iter_mut().zip(root) {
                *a += b;
            }
        }
        acc
    }

    /// <h_i, rho_bullet> as an exact rational.
    pub fn rho_bullet_pairing(&self, i: usize) -> Rational {
        let two = self.pairing(i, &self.two_rho_bullet());
        Rational::new(two.into(), 2.into())
    }

    fn validate(&self) -> Result<(), CartanError> {
        let err = |m: String| Err(CartanError::Validation(m));
        for v in self.vertices() {
            if self.tau(self.tau(v)) != v {
                return err(format!("tau is not an involution at vertex {v}"));
            }
            if self.is_black(v) != self.is_black(self.tau(v)) {
                return err(format!("tau does not preserve black vertices at {v}"));
            }
        }
        for i in self.vertices() {
            for j in self.vertices() {
                if self.a(self.tau(i), self.tau(j)) != self.a(i, j) {
                    return err(format!(
                        "tau does not preserve the Cartan matrix at ({i},{j})"
                    ));
                }
                if self.d(i) * self.a(i, j) != self.d(j) * self.a(j, i) {
                    return err(format!("symmetrizer equation fails at ({i},{j})"));
                }
            }
        }
        for &i in &self.i_otimes {
            if self.is_black(i) {
                return err(format!("marked vertex {i} is black"));
            }
            if self.tau(i) != i {
                return err(format!("marked vertex {i} is not fixed by tau"));
            }
            for &j in &self.i_otimes {
                if i != j && self.a(i, j) != 0 {
                    return err(format!("marked vertices {i},{j} are adjacent"));
                }
            }
            for &b in &self.i_bullet {
                if self.a(b, i) != 0 {
                    return err(format!(
                        "marked vertex {i} is adjacent to black vertex {b}"
                    ));
                }
            }
        }
        // -w_bullet(alpha_i) = alpha_{tau(i)} for black i.
        let word = self.w_bullet_word();
        for &i in &self.i_bullet {
            let img = self.apply_word(&word, &self.alpha(i));
            let mut expected = self.alpha(self.tau(i));
            for c in expected.iter_mut() {
                *c = -*c;
            }
            if img != expected {
                return err(format!(
                    "-w_bullet(alpha_{i}) != alpha_tau({i}) (got {img:?})"
                ));
            }
        }
        Ok(())
    }
}

/// Positive roots of the subsystem spanned by the given vertices.
fn positive_roots_of_subset(datum: &SatakeDatum, verts: &BTreeSet<usize>) -> Vec<LatticeVec> {
    let mut roots: Vec<LatticeVec> = verts.iter().map(|&v| datum.alpha(v)).collect();
    let mut known: BTreeSet<LatticeVec> = roots.iter().cloned().collect();
    let mut frontier = roots.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for root in &frontier {
            for &i in verts {
                // alpha + alpha_i is a root iff p - <h_i, alpha> > 0 where p
                // is the largest k with alpha - k alpha_i a root.
                let mut p = 0i64;
                let mut probe = root.clone();
                loop {
                    probe[i - 1] -= 1;
                    if known.contains(&probe) {
                        p += 1;
                    } else {
                        break;
                    }
                }
                if p - datum.pairing(i, root) > 0 {
                    let mut up = root.clone();
                    up[i - 1] += 1;
                    if known.insert(up.clone()) {
                        roots.push(up.clone());
                        next.push(up);
                    }
                }
            }
        }
        frontier = next;
    }
    roots.sort();
    roots
}

/// Build the datum for a family from the diagram table.
pub fn satake(family: Family) -> Result<SatakeDatum, CartanError> {
    use Family::*;
    let bad = |name: &str, reason: &str| {
        Err(CartanError::InvalidRank {
            family: name.into(),
            reason: reason.into(),
        })
    };
    type Tau = Box<dyn Fn(usize) -> usize>;
    let fork_swap = |n: usize| -> Tau {
        Box::new(move |v| {
            if v == n - 1 {
                n
            } else if v == n {
                n - 1
            } else {
                v
            }
        })
    };
    let (ambient, bullets, marked, tau): (AmbientType, Vec<usize>, Vec<usize>, Tau) = match &family
    {
        AI1 { r } => {
            if *r < 1 {
                return bad("AI-1", "requires r >= 1");
            }
            let n = 2 * r;
            (
                AmbientType::A(n),
                vec![],
                (1..=n).step_by(2).collect(),
                Box::new(|v| v),
            )
        }
        AI2 { r } => {
            if *r < 1 {
                return bad("AI-2", "requires r >= 1");
            }
            let n = 2 * r - 1;
            (
                AmbientType::A(n),
                vec![],
                (1..=n).step_by(2).collect(),
                Box::new(|v| v),
            )
        }
        AII { r } => {
            if *r < 2 {
                return bad("AII", "requires r >= 2");
            }
            let n = 2 * r - 1;
            (
                AmbientType::A(n),
                (1..=n).step_by(2).collect(),
                vec![],
                Box::new(|v| v),
            )
        }
        AIII { r, s } => {
            if !(1 < *r && *r < *s) {
                return bad("AIII", "requires 1 < r < s");
            }
            let n = r + s - 1;
            let rs = r + s;
            (
                AmbientType::A(n),
                (*r + 1..=s - 1).collect(),
                vec![],
                Box::new(move |v| rs - v),
            )
        }
        AIV { r } => {
            if *r < 1 {
                return bad("AIV", "requires r >= 1");
            }
            let n = 2 * r - 1;
            let rr = *r;
            (
                AmbientType::A(n),
                vec![],
                vec![rr],
                Box::new(move |v| 2 * rr - v),
            )
        }
        BI1 { r } => {
            if *r < 1 {
                return bad("BI-1", "requires r >= 1");
            }
            (
                AmbientType::B(2 * r),
                vec![],
                (1..=2 * r - 1).step_by(2).collect(),
                Box::new(|v| v),
            )
        }
        BI2 { r } => {
            if *r < 2 {
                return bad("BI-2", "requires r >= 2");
            }
            (
                AmbientType::B(2 * r - 1),
                vec![],
                (1..=2 * r - 1).step_by(2).collect(),
                Box::new(|v| v),
            )
        }
        BII1 { r, s } => {
            if *r < 1 || *s < 1 {
                return bad("BII-1", "requires r >= 1, s >= 1");
            }
            (
                AmbientType::B(2 * r + s),
                (2 * r + 1..=2 * r + s).collect(),
                (1..=2 * r - 1).step_by(2).collect(),
                Box::new(|v| v),
            )
        }
        BII2 { r, s } => {
            if *r < 2 {
                return bad("BII-2", "requires r >= 2");
            }
            (
                AmbientType::B(2 * r + s),
                (2 * r..=2 * r + s).collect(),
                (1..=2 * r - 3).step_by(2).collect(),
                Box::new(|v| v),
            )
        }
        CI { n } => {
            if *n < 2 {
                return bad("CI", "requires n >= 2");
            }
            (AmbientType::C(*n), vec![], vec![*n], Box::new(|v| v))
        }
        CII { r, s } => {
            if *r < 1 {
                return bad("CII", "requires r >= 1");
            }
            let mut b: Vec<usize> = (1..=2 * r - 1).step_by(2).collect();
            b.extend(2 * r + 1..=2 * r + s);
            (AmbientType::C(2 * r + s), b, vec![], Box::new(|v| v))
        }
        DI1 { r } => {
            if *r < 2 {
                return bad("DI-1", "requires r >= 2");
            }
            let mut m: Vec<usize> = (2..=2 * r).step_by(2).collect();
            m.push(2 * r + 1);
            (AmbientType::D(2 * r + 1), vec![], m, Box::new(|v| v))
        }
        DI2 { r } => {
            if *r < 2 {
                return bad("DI-2", "requires r >= 2");
            }
            let mut m: Vec<usize> = (1..=2 * r - 1).step_by(2).collect();
            m.push(2 * r);
            (AmbientType::D(2 * r), vec![], m, Box::new(|v| v))
        }
        DI3 { r, s } => {
            if *r < 1 || *s < 1 || 2 * r + s < 4 {
                return bad("DI-3", "requires r >= 1, s >= 1, rank >= 4");
            }
            let n = 2 * r + s;
            // The black subsystem is D-type of rank s+1; its longest element
            // swaps the fork tips exactly when s+1 is odd.
            let tau = if (s + 1) % 2 == 1 {
                fork_swap(n)
            } else {
                Box::new(|v| v) as Tau
            };
            (
                AmbientType::D(n),
                (2 * r..=n).collect(),
                (2..=2 * r - 2).step_by(2).collect(),
                tau,
            )
        }
        DI4 { r, s } => {
            if *r < 1 || *s < 2 || 2 * r + s < 4 {
                return bad("DI-4", "requires r >= 1, s > 1, rank >= 4");
            }
            let n = 2 * r + s;
            let tau = if s % 2 == 1 {
                fork_swap(n)
            } else {
                Box::new(|v| v) as Tau
            };
            (
                AmbientType::D(n),
                (2 * r + 1..=n).collect(),
                (1..=2 * r - 1).step_by(2).collect(),
                tau,
            )
        }
        DII1 { r } => {
            if *r < 2 {
                return bad("DII-1", "requires r >= 2");
            }
            (
                AmbientType::D(2 * r),
                (1..=2 * r - 1).step_by(2).collect(),
                vec![2 * r],
                Box::new(|v| v),
            )
        }
        DII2 { r } => {
            if *r < 3 {
                return bad("DII-2", "requires r >= 3");
            }
            let n = 2 * r - 1;
            (
                AmbientType::D(n),
                (1..=2 * r - 3).step_by(2).collect(),
                vec![],
                fork_swap(n),
            )
        }
        DIII1 { r } => {
            if *r < 2 {
                return bad("DIII-1", "requires r >= 2");
            }
            let n = 2 * r;
            (
                AmbientType::D(n),
                vec![],
                (2..=2 * r - 2).step_by(2).collect(),
                fork_swap(n),
            )
        }
        DIII2 { r } => {
            if *r < 3 {
                return bad("DIII-2", "requires r >= 3");
            }
            let n = 2 * r - 1;
            (
                AmbientType::D(n),
                vec![],
                (1..=2 * r - 3).step_by(2).collect(),
                fork_swap(n),
            )
        }
        EI => (AmbientType::E(6), vec![], vec![2, 3, 5], Box::new(|v| v)),
        EII => (
            AmbientType::E(6),
            vec![],
            vec![4],
            Box::new(|v| match v {
                1 => 6,
                6 => 1,
                3 => 5,
                5 => 3,
                _ => v,
            }),
        ),
        // The EIII row lists marked vertex 4, but 4 is black there and the
        // drawn diagram carries no marks; the diagram wins.
        EIII => (
            AmbientType::E(6),
            vec![3, 4, 5],
            vec![],
            Box::new(|v| match v {
                1 => 6,
                6 => 1,
                3 => 5,
                5 => 3,
                _ => v,
            }),
        ),
        EIV => (AmbientType::E(6), vec![2, 3, 4, 5], vec![], Box::new(|v| v)),
        EV => (AmbientType::E(7), vec![], vec![2, 3, 5, 7], Box::new(|v| v)),
        EVI => (AmbientType::E(7), vec![2, 5, 7], vec![3], Box::new(|v| v)),
        EVII => (AmbientType::E(7), vec![2, 3, 4, 5], vec![7], Box::new(|v| v)),
        EVIII => (AmbientType::E(8), vec![], vec![2, 3, 5, 7], Box::new(|v| v)),
        EIX => (AmbientType::E(8), vec![2, 3, 4, 5], vec![7], Box::new(|v| v)),
        FI => (AmbientType::F4, vec![], vec![2], Box::new(|v| v)),
        FII => (AmbientType::F4, vec![1, 2, 3], vec![], Box::new(|v| v)),
        G => (AmbientType::G2, vec![], vec![2], Box::new(|v| v)),
    };

    let n = ambient.rank();
    let cartan = ambient.cartan_matrix();
    let d = symmetrizers(&cartan);
    let datum = SatakeDatum {
        family,
        ambient,
        n,
        i_bullet: bullets.into_iter().collect(),
        i_otimes: marked.into_iter().collect(),
        tau_map: (1..=n).map(tau).collect(),
        cartan,
        d,
    };
    datum.validate()?;
    Ok(datum)
}

/// Pairwise-coprime positive symmetrizers d_i with d_i a_{ij} = d_j a_{ji}.
fn symmetrizers(cartan: &[Vec<i64>]) -> Vec<i64> {
    let n = cartan.len();
    // Propagate ratios as fractions, then clear denominators per the whole
    // diagram and remove the common factor.
    let mut d: Vec<Option<(i64, i64)>> = vec![None; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some((1, 1));
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let (ni, di) = d[i].unwrap();
            for j in 0..n {
                if i == j || cartan[i][j] == 0 || d[j].is_some() {
                    continue;
                }
                // d_j / d_i = a_{ij} / a_{ji}; both entries are negative.
                let num = ni * cartan[i][j];
                let den = di * cartan[j][i];
                let g = num_integer::gcd(num, den).max(1);
                d[j] = Some((num / g, den / g));
                stack.push(j);
            }
        }
    }
    let lcm_den = d
        .iter()
        .map(|x| x.unwrap().1.abs())
        .fold(1i64, num_integer::lcm);
    let mut out: Vec<i64> = d
        .iter()
        .map(|x| {
            let (num, den) = x.unwrap();
            num * (lcm_den / den)
        })
        .collect();
    let g = out.iter().fold(0i64, |acc, &x| num_integer::gcd(acc, x));
    for x in out.iter_mut() {
        *x /= g;
    }
    debug_assert!(out.iter().all(|&x| x > 0));
    out
}

/// Parse a family tag like "AI-1" plus rank parameters.
pub fn parse_family(tag: &str, r: Option<usize>, s: Option<usize>) -> Result<Family, CartanError> {
    let need_r = || {
        r.ok_or_else(|| CartanError::InvalidRank {
            family: tag.into(),
            reason: "missing rank parameter r".into(),
        })
    };
    let need_s = || {
        s.ok_or_else(|| CartanError::InvalidRank {
            family: tag.into(),
            reason: "missing rank parameter s".into(),
        })
    };
    Ok(match tag {
        "AI-1" => Family::AI1 { r: need_r()? },
        "AI-2" => Family::AI2 { r: need_r()? },
        "AII" => Family::AII { r: need_r()? },
        "AIII" => Family::AIII {
            r: need_r()?,
            s: need_s()?,
        },
        "AIV" => Family::AIV { r: need_r()? },
        "BI-1" => Family::BI1 { r: need_r()? },
        "BI-2" => Family::BI2 { r: need_r()? },
        "BII-1" => Family::BII1 {
            r: need_r()?,
            s: need_s()?,
        },
        "BII-2" => Family::BII2 {
            r: need_r()?,
            s: need_s()?,
        },
        "CI" => Family::CI { n: need_r()? },
        "CII" => Family::CII {
            r: need_r()?,
            s: need_s()?,
        },
        "DI-1" => Family::DI1 { r: need_r()? },
        "DI-2" => Family::DI2 { r: need_r()? },
        "DI-3" => Family::DI3 {
            r: need_r()?,
            s: need_s()?,
        },
        "DI-4" => Family::DI4 {
            r: need_r()?,
            s: need_s()?,
        },
        "DII-1" => Family::DII1 { r: need_r()? },
        "DII-2" => Family::DII2 { r: need_r()? },
        "DIII-1" => Family::DIII1 { r: need_r()? },
        "DIII-2" => Family::DIII2 { r: need_r()? },
        "EI" => Family::EI,
        "EII" => Family::EII,
        "EIII" => Family::EIII,
        "EIV" => Family::EIV,
        "EV" => Family::EV,
        "EVI" => Family::EVI,
        "EVII" => Family::EVII,
        "EVIII" => Family::EVIII,
        "EIX" => Family::EIX,
        "FI" => Family::FI,
        "FII" => Family::FII,
        "G" => Family::G,
        other => return Err(CartanError::UnknownFamily(other.into())),
    })
}

/// All table entries at small rank, for whole-table invariant checks.
pub fn table_sample() -> Vec<Family> {
    use Family::*;
    vec![
        AI1 { r: 1 },
        AI1 { r: 2 },
        AI1 { r: 3 },
        AI2 { r: 1 },
        AI2 { r: 2 },
        AI2 { r: 3 },
        AII { r: 2 },
        AII { r: 3 },
        AIII { r: 2, s: 3 },
        AIII { r: 2, s: 4 },
        AIII { r: 3, s: 5 },
        AIV { r: 1 },
        AIV { r: 2 },
        AIV { r: 3 },
        BI1 { r: 1 },
        BI1 { r: 2 },
        BI2 { r: 2 },
        BI2 { r: 3 },
        BII1 { r: 1, s: 1 },
        BII1 { r: 2, s: 2 },
        BII2 { r: 2, s: 0 },
        BII2 { r: 2, s: 1 },
        CI { n: 2 },
        CI { n: 3 },
        CII { r: 1, s: 0 },
        CII { r: 1, s: 2 },
        CII { r: 2, s: 1 },
        DI1 { r: 2 },
        DI1 { r: 3 },
        DI2 { r: 2 },
        DI2 { r: 3 },
        DI3 { r: 1, s: 2 },
        DI3 { r: 1, s: 3 },
        DI3 { r: 2, s: 1 },
        DI4 { r: 1, s: 2 },
        DI4 { r: 1, s: 3 },
        DI4 { r: 2, s: 2 },
        DII1 { r: 2 },
        DII1 { r: 3 },
        DII2 { r: 3 },
        DII2 { r: 4 },
        DIII1 { r: 2 },
        DIII1 { r: 3 },
        DIII2 { r: 3 },
        DIII2 { r: 4 },
        EI,
        EII,
        EIII,
        EIV,
        EV,
        EVI,
        EVII,
        EVIII,
        EIX,
        FI,
        FII,
        G,
    ]
}

/// Coordinates on (t')^*: pairings against the k-type generators for every
/// vertex outside the marked set, then against b_j for marked j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaLattice {
    /// Basis of the tau-twisted sublattice of Q (zero vectors dropped).
    pub qtheta_basis: Vec<LatticeVec>,
    /// Vertices indexing the k-part coordinates (I minus the marked set).
    pub k_indices: Vec<usize>,
    /// Marked vertices indexing the b-part coordinates.
    pub b_indices: Vec<usize>,
    /// beta_i = alpha_i restricted, as a coordinate vector, per vertex.
    pub beta: Vec<Vec<Rational>>,
    /// 2 rho_bullet as a lattice vector.
    pub two_rho_bullet: LatticeVec,
}

impl ThetaLattice {
    pub fn dim(&self) -> usize {
        self.k_indices.len() + self.b_indices.len()
    }

    pub fn beta(&self, i: usize) -> &[Rational] {
        &self.beta[i - 1]
    }

    /// The functional b^j: unit vector on the b-coordinate of marked vertex j.
    pub fn b_dual(&self, j: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        let pos = self
            .b_indices
            .iter()
            .position(|&m| m == j)
            .expect("b_dual of unmarked vertex");
        v[self.k_indices.len() + pos] = Rational::one();
        v
    }
}

/// Restricted lattice data for a datum.
pub fn theta_lattice(datum: &SatakeDatum) -> ThetaLattice {
    let mut basis: Vec<LatticeVec> = Vec::new();
    let mut seen: BTreeSet<LatticeVec> = BTreeSet::new();
    for i in datum.vertices() {
        let v = if datum.is_black(i) {
            datum.alpha(i)
        } else {
            let t = datum.tau(i);
            let mut v = datum.alpha(i);
            v[t - 1] -= 1;
            v
        };
        if v.iter().all(|&c| c == 0) {
            continue;
        }
        let mut neg = v.clone();
        for c in neg.iter_mut() {
            *c = -*c;
        }
        if seen.contains(&v) || seen.contains(&neg) {
            continue;
        }
        seen.insert(v.clone());
        basis.push(v);
    }
    let k_indices: Vec<usize> = datum
        .vertices()
        .filter(|v| !datum.is_marked(*v))
        .collect();
    let b_indices: Vec<usize> = datum.i_otimes.iter().copied().collect();
    let dim = k_indices.len() + b_indices.len();
    let mut beta = Vec::with_capacity(datum.rank());
    for i in datum.vertices() {
        let mut coords = vec![Rational::zero(); dim];
        for (slot, &m) in k_indices.iter().enumerate() {
            // Pair alpha_i against h_m - h_{tau(m)} (white) or h_m (black).
            let val = if datum.is_black(m) {
                datum.a(m, i)
            } else {
                datum.a(m, i) - datum.a(datum.tau(m), i)
            };
            coords[slot] = Rational::from_int(val);
        }
        beta.push(coords);
    }
    ThetaLattice {
        qtheta_basis: basis,
        k_indices,
        b_indices,
        beta,
        two_rho_bullet: datum.two_rho_bullet(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ai1_r2_matches_table() {
        let d = satake(Family::AI1 { r: 2 }).unwrap();
        assert_eq!(d.rank(), 4);
        assert!(d.i_bullet().is_empty());
        assert_eq!(d.i_otimes().iter().copied().collect::<Vec<_>>(), vec![1, 3]);
        for v in d.vertices() {
            assert_eq!(d.tau(v), v);
        }
    }

    #[test]
    fn aii_r2_matches_table() {
        let d = satake(Family::AII { r: 2 }).unwrap();
        assert_eq!(d.rank(), 3);
        assert_eq!(d.i_bullet().iter().copied().collect::<Vec<_>>(), vec![1, 3]);
        assert!(d.i_otimes().is_empty());
        assert_eq!(d.w_bullet_word(), vec![1, 3]);
    }

    #[test]
    fn aiv_r2_matches_table() {
        let d = satake(Family::AIV { r: 2 }).unwrap();
        assert_eq!(d.rank(), 3);
        assert!(d.i_bullet().is_empty());
        assert_eq!(d.i_otimes().iter().copied().collect::<Vec<_>>(), vec![2]);
        assert_eq!(d.tau(1), 3);
        assert_eq!(d.tau(2), 2);
    }

    #[test]
    fn whole_table_invariants() {
        for fam in table_sample() {
            let tag = fam.to_string();
            let d = satake(fam).unwrap_or_else(|e| panic!("{tag}: {e}"));
            // Validation ran in the constructor; also exercise derived data.
            let rho = d.two_rho_bullet();
            assert_eq!(rho.len(), d.rank());
            let t = theta_lattice(&d);
            assert_eq!(t.dim(), t.k_indices.len() + t.b_indices.len());
            for &j in t.b_indices.clone().iter() {
                // <b_i, b^j> = delta is built in; the vector has unit support.
                let bj = t.b_dual(j);
                assert_eq!(bj.iter().filter(|c| !c.is_zero()).count(), 1);
            }
        }
    }

    #[test]
    fn theta_lattice_examples() {
        // AI-2 r=2: tau = id with no black vertices, so the twisted lattice
        // vanishes.
        let d = satake(Family::AI2 { r: 2 }).unwrap();
        let t = theta_lattice(&d);
        assert!(t.qtheta_basis.is_empty());

        // AIV r=2: spanned by alpha_1 - alpha_3.
        let d = satake(Family::AIV { r: 2 }).unwrap();
        let t = theta_lattice(&d);
        assert_eq!(t.qtheta_basis, vec![vec![1, 0, -1]]);

        // AI-1 r=1: beta_2 = 0 and <b^1, beta_2> = 0.
        let d = satake(Family::AI1 { r: 1 }).unwrap();
        let t = theta_lattice(&d);
        assert!(t.beta(2).iter().all(|c| c.is_zero()));
        assert_eq!(t.b_dual(1).len(), t.dim());
    }

    #[test]
    fn aiii_tau_and_bullets() {
        let d = satake(Family::AIII { r: 2, s: 4 }).unwrap();
        assert_eq!(d.rank(), 5);
        assert_eq!(d.tau(1), 5);
        assert_eq!(d.tau(3), 3);
        assert_eq!(d.i_bullet().iter().copied().collect::<Vec<_>>(), vec![3]);
        assert_eq!(d.w_bullet_word(), vec![3]);
    }

    #[test]
    fn b_type_symmetrizers() {
        let d = satake(Family::BI1 { r: 1 }).unwrap();
        assert_eq!(d.d(1), 2);
        assert_eq!(d.d(2), 1);
        assert_eq!(d.a(1, 2), -1);
        assert_eq!(d.a(2, 1), -2);
        assert_eq!(d.qi(1), QScalar::q_power(2));
    }

    #[test]
    fn rho_bullet_for_aii() {
        let d = satake(Family::AII { r: 2 }).unwrap();
        assert_eq!(d.two_rho_bullet(), vec![1, 0, 1]);
        assert_eq!(d.rho_bullet_pairing(2), Rational::from_int(-1));
        assert_eq!(d.rho_bullet_pairing(1), Rational::from_int(1));
    }

    #[test]
    fn invalid_ranks_rejected() {
        assert!(satake(Family::AIII { r: 1, s: 3 }).is_err());
        assert!(satake(Family::AII { r: 1 }).is_err());
        assert!(parse_family("ZZ", None, None).is_err());
    }
}
