//! Character table of the order-32 group, irreducible matrix models, induced
//! characters of the two subgroups, and decomposition of class functions.
//!
//! Everything here is exact: characters are rational (in fact integral) and
//! the matrix models live over the Gaussian rationals.

use super::exact::{q, QIMat, QMat, Q, QI};
use num::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{gerst, FiniteGroup, Subgroup};

/// Names for the eleven irreducibles. The eight linear characters are labelled
/// by their signs on (s, t, u); the two-dimensional pair by the sign of their
/// value on the tu class; X is the unique four-dimensional one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IrrepName {
    Linear { s: bool, t: bool, u: bool },
    WPlus,
    WMinus,
    X,
}

impl IrrepName {
    pub fn all() -> Vec<IrrepName> {
        let mut out = Vec::new();
        // Row order of the printed table: trivial first, then the other
        // linear characters with s = +1, then the s = -1 block, then W±, X.
        for &(s, t, u) in &[
            (true, true, true),
            (true, false, true),
            (true, true, false),
            (true, false, false),
            (false, true, true),
            (false, false, true),
            (false, true, false),
            (false, false, false),
        ] {
            out.push(IrrepName::Linear { s, t, u });
        }
        out.push(IrrepName::WPlus);
        out.push(IrrepName::WMinus);
        out.push(IrrepName::X);
        out
    }

    pub fn dim(self) -> usize {
        match self {
            IrrepName::Linear { .. } => 1,
            IrrepName::WPlus | IrrepName::WMinus => 2,
            IrrepName::X => 4,
        }
    }

    pub fn label(self) -> String {
        match self {
            IrrepName::Linear { s, t, u } => {
                let sgn = |b: bool| if b { '+' } else { '-' };
                if s && t && u {
                    "1".to_string()
                } else {
                    format!("1({}{}{})", sgn(s), sgn(t), sgn(u))
                }
            }
            IrrepName::WPlus => "W+".to_string(),
            IrrepName::WMinus => "W-".to_string(),
            IrrepName::X => "X".to_string(),
        }
    }

    pub fn parse(label: &str) -> Option<IrrepName> {
        let norm = label.trim();
        match norm {
            "1" | "1(+++)" => Some(IrrepName::Linear {
                s: true,
                t: true,
                u: true,
            }),
            "W+" | "w+" => Some(IrrepName::WPlus),
            "W-" | "w-" => Some(IrrepName::WMinus),
            "X" | "x" => Some(IrrepName::X),
            _ => {
                let inner = norm.strip_prefix("1(")?.strip_suffix(')')?;
                let chars: Vec<char> = inner.chars().collect();
                if chars.len() != 3 || chars.iter().any(|&c| c != '+' && c != '-') {
                    return None;
                }
                Some(IrrepName::Linear {
                    s: chars[0] == '+',
                    t: chars[1] == '+',
                    u: chars[2] == '+',
                })
            }
        }
    }
}

/// Matrix model of one irreducible: images of the generators s, t, u.
#[derive(Debug, Clone)]
pub struct IrrepMatrices {
    pub name: IrrepName,
    pub dim: usize,
    pub s: QIMat,
    pub t: QIMat,
    pub u: QIMat,
}

impl IrrepMatrices {
    /// Image of an arbitrary element written as s^i · t^a · u^b.
    pub fn of(&self, element: usize) -> QIMat {
        let (i, h) = gerst::decode(element);
        let mut m = self.s.pow(i);
        if h & 1 == 1 {
            m = m.matmul(&self.t);
        }
        if h & 2 == 2 {
            m = m.matmul(&self.u);
        }
        m
    }

    pub fn character_on(&self, element: usize) -> Q {
        let tr = self.of(element).trace();
        assert!(tr.im.is_zero(), "characters of this group are real");
        tr.re
    }
}

fn scalar(v: i64) -> QIMat {
    let mut m = QIMat::zeros(1, 1);
    *m.at_mut(0, 0) = QI::new(q(v), Q::zero());
    m
}

/// Explicit matrices for each irreducible, verified against the defining
/// relations s^8 = t^2 = u^2 = 1, tu = ut, t s t = s^7, u s u = s^3.
pub fn irreducible_matrices(name: IrrepName) -> IrrepMatrices {
    let (s, t, u) = match name {
        IrrepName::Linear { s, t, u } => {
            let pm = |b: bool| if b { 1 } else { -1 };
            (scalar(pm(s)), scalar(pm(t)), scalar(pm(u)))
        }
        IrrepName::WPlus => (
            QIMat::from_rows_i64(&[&[(0, 1), (0, 0)], &[(0, 0), (0, -1)]]),
            QIMat::from_rows_i64(&[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]]),
            QIMat::from_rows_i64(&[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]]),
        ),
        IrrepName::WMinus => (
            QIMat::from_rows_i64(&[&[(0, 1), (0, 0)], &[(0, 0), (0, -1)]]),
            QIMat::from_rows_i64(&[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]]),
            QIMat::from_rows_i64(&[&[(0, 0), (-1, 0)], &[(-1, 0), (0, 0)]]),
        ),
        IrrepName::X => (
            // Cyclic shift with a sign: the regular model on 1, z, z^2, z^3
            // with z^4 = -1.
            QIMat::from_rows_i64(&[
                &[(0, 0), (0, 0), (0, 0), (-1, 0)],
                &[(1, 0), (0, 0), (0, 0), (0, 0)],
                &[(0, 0), (1, 0), (0, 0), (0, 0)],
                &[(0, 0), (0, 0), (1, 0), (0, 0)],
            ]),
            QIMat::from_rows_i64(&[
                &[(1, 0), (0, 0), (0, 0), (0, 0)],
                &[(0, 0), (0, 0), (0, 0), (-1, 0)],
                &[(0, 0), (0, 0), (-1, 0), (0, 0)],
                &[(0, 0), (-1, 0), (0, 0), (0, 0)],
            ]),
            QIMat::from_rows_i64(&[
                &[(1, 0), (0, 0), (0, 0), (0, 0)],
                &[(0, 0), (0, 0), (0, 0), (1, 0)],
                &[(0, 0), (0, 0), (-1, 0), (0, 0)],
                &[(0, 0), (1, 0), (0, 0), (0, 0)],
            ]),
        ),
    };
    let rep = IrrepMatrices {
        name,
        dim: name.dim(),
        s,
        t,
        u,
    };
    debug_assert!(rep.satisfies_relations());
    rep
}

impl IrrepMatrices {
    pub fn satisfies_relations(&self) -> bool {
        let id = QIMat::identity(self.dim);
        let s7 = self.s.pow(7);
        self.s.pow(8) == id
            && self.t.matmul(&self.t) == id
            && self.u.matmul(&self.u) == id
            && self.t.matmul(&self.u) == self.u.matmul(&self.t)
            && self.t.matmul(&self.s).matmul(&self.t) == s7
            && self.u.matmul(&self.s).matmul(&self.u) == self.s.pow(3)
    }
}

/// Exact character table in a fixed class order, plus bookkeeping to evaluate
/// and decompose class functions.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    /// Display names of the classes, in table column order.
    pub class_names: Vec<String>,
    /// One representative element per class, same order.
    pub class_reps: Vec<usize>,
    /// Class sizes, same order.
    pub class_sizes: Vec<usize>,
    /// Row names, in table row order.
    pub row_names: Vec<IrrepName>,
    /// values[row][col] = character of irrep `row` on class `col`.
    pub values: Vec<Vec<Q>>,
    /// For each group element, the column of its class.
    element_class: Vec<usize>,
}

/// A class function given by its values in the table's class order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassFunction {
    pub values: Vec<Q>,
}

/// Column order of the printed table: powers of s first (identity, the
/// central s^4, then s^2), the tu classes, then the size-4 classes.
const CLASS_ORDER: [(&str, (usize, usize)); 11] = [
    ("1", (0, 0)),
    ("s4", (4, 0)),
    ("s2", (2, 0)),
    ("tu", (0, 3)),
    ("s2tu", (2, 3)),
    ("s", (1, 0)),
    ("t", (0, 1)),
    ("u", (0, 2)),
    ("st", (1, 1)),
    ("su", (1, 2)),
    ("stu", (1, 3)),
];

pub fn character_table(group: &FiniteGroup) -> Result<CharacterTable> {
    let (classes, element_to_class) = group.class_index();
    if classes.len() != CLASS_ORDER.len() {
        return Err(Error::Config(format!(
            "expected {} conjugacy classes, found {}",
            CLASS_ORDER.len(),
            classes.len()
        )));
    }
    // Reorder the computed classes to the fixed display order.
    let mut class_reps = Vec::new();
    let mut class_sizes = Vec::new();
    let mut class_names = Vec::new();
    let mut class_of_element = vec![usize::MAX; group.order];
    let mut seen = vec![false; classes.len()];
    for (col, &(name, (i, h))) in CLASS_ORDER.iter().enumerate() {
        let rep = gerst::encode(i, h);
        let idx = element_to_class[rep];
        if seen[idx] {
            return Err(Error::Config(format!(
                "class representative {name} repeats an earlier class"
            )));
        }
        seen[idx] = true;
        class_names.push(name.to_string());
        class_reps.push(rep);
        class_sizes.push(classes[idx].len());
        for &g in &classes[idx] {
            class_of_element[g] = col;
        }
    }

    let row_names = IrrepName::all();
    let mut values = Vec::new();
    for &name in &row_names {
        let rep = irreducible_matrices(name);
        values.push(
            class_reps
                .iter()
                .map(|&g| rep.character_on(g))
                .collect::<Vec<Q>>(),
        );
    }

    let table = CharacterTable {
        class_names,
        class_reps,
        class_sizes,
        row_names,
        values,
        element_class: class_of_element,
    };
    table.verify_orthogonality(group.order)?;
    Ok(table)
}

impl CharacterTable {
    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn row(&self, name: IrrepName) -> &[Q] {
        let idx = self
            .row_names
            .iter()
            .position(|&n| n == name)
            .expect("row name comes from this table");
        &self.values[idx]
    }

    pub fn class_of(&self, element: usize) -> usize {
        self.element_class[element]
    }

    /// First orthogonality: <chi_i, chi_j> = delta_ij, exactly.
    fn verify_orthogonality(&self, group_order: usize) -> Result<()> {
        let n = self.row_names.len();
        for i in 0..n {
            for j in 0..n {
                let mut acc = Q::zero();
                for c in 0..self.class_count() {
                    acc += q(self.class_sizes[c] as i64) * self.values[i][c] * self.values[j][c];
                }
                let expect = if i == j { q(group_order as i64) } else { Q::zero() };
                if acc != expect {
                    return Err(Error::Config(format!(
                        "character rows {} and {} are not orthonormal",
                        self.row_names[i].label(),
                        self.row_names[j].label()
                    )));
                }
            }
        }
        // Column of the identity must list the dimensions.
        for (row, &name) in self.row_names.iter().enumerate() {
            if self.values[row][0] != q(name.dim() as i64) {
                return Err(Error::Config(format!(
                    "row {} does not start with its dimension",
                    name.label()
                )));
            }
        }
        Ok(())
    }

    /// Inner product of two class functions with respect to this table's
    /// class data.
    pub fn inner(&self, a: &ClassFunction, b: &ClassFunction) -> Q {
        let order: usize = self.class_sizes.iter().sum();
        let mut acc = Q::zero();
        for c in 0..self.class_count() {
            acc += q(self.class_sizes[c] as i64) * a.values[c] * b.values[c];
        }
        acc / q(order as i64)
    }

    /// Decompose a class function into irreducibles. Errors when any
    /// multiplicity is not a non-negative integer (i.e. the input is not a
    /// genuine character) or when the norms do not reconcile.
    pub fn decompose(&self, chi: &ClassFunction) -> Result<Vec<(IrrepName, usize)>> {
        if chi.values.len() != self.class_count() {
            return Err(Error::Config(
                "class function has the wrong number of classes".to_string(),
            ));
        }
        let mut out = Vec::new();
        let mut reconstructed = vec![Q::zero(); self.class_count()];
        for (row, &name) in self.row_names.iter().enumerate() {
            let m = self.inner(
                chi,
                &ClassFunction {
                    values: self.values[row].clone(),
                },
            );
            if !m.is_integer() || m.is_negative() {
                return Err(Error::Config(format!(
                    "multiplicity of {} is {}, not a non-negative integer",
                    name.label(),
                    m
                )));
            }
            let mult = m.to_integer() as usize;
            if mult > 0 {
                out.push((name, mult));
            }
            for c in 0..self.class_count() {
                reconstructed[c] += m * self.values[row][c];
            }
        }
        if reconstructed != chi.values {
            return Err(Error::Config(
                "class function is not a sum of irreducible characters".to_string(),
            ));
        }
        Ok(out)
    }
}

/// Character of the permutation representation on cosets G/H: the number of
/// fixed cosets of each class representative. Cross-checked internally
/// against the induction formula
///   chi(g) = (1/|H|) * #{x in G : x^{-1} g x in H}.
pub fn induced_character(
    group: &FiniteGroup,
    subgroup: &Subgroup,
    table: &CharacterTable,
) -> Result<ClassFunction> {
    let in_h: Vec<bool> = {
        let mut mask = vec![false; group.order];
        for &h in &subgroup.elements {
            mask[h] = true;
        }
        mask
    };
    // Left cosets gH, numbered by minimal element.
    let mut coset_of = vec![usize::MAX; group.order];
    let mut coset_mins = Vec::new();
    for g in 0..group.order {
        if coset_of[g] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = subgroup.elements.iter().map(|&h| group.mul(g, h)).collect();
        let min = *members.iter().min().unwrap();
        let id = coset_mins.len();
        coset_mins.push(min);
        for m in members {
            coset_of[m] = id;
        }
    }

    let mut values = Vec::new();
    for &rep in &table.class_reps {
        // Fixed cosets of rep: gH with rep·g·H = g·H, i.e. g^{-1}·rep·g in H.
        let mut fixed = 0usize;
        for &min in &coset_mins {
            if in_h[group.mul(group.mul(group.inv(min), rep), min)] {
                fixed += 1;
            }
        }
        // Induction formula as an independent route.
        let mut conj_count = 0usize;
        for x in 0..group.order {
            if in_h[group.mul(group.mul(group.inv(x), rep), x)] {
                conj_count += 1;
            }
        }
        let via_formula = q(conj_count as i64) / q(subgroup.elements.len() as i64);
        if via_formula != q(fixed as i64) {
            return Err(Error::Config(
                "fixed-point count disagrees with the induction formula".to_string(),
            ));
        }
        values.push(q(fixed as i64));
    }
    Ok(ClassFunction { values })
}

/// Render the table (plus optional extra rows) as an aligned text grid.
pub fn format_table(table: &CharacterTable, extra: &[(String, ClassFunction)]) -> String {
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["".to_string()];
    header.extend(table.class_names.iter().cloned());
    rows.push(header);
    let mut sizes = vec!["size".to_string()];
    sizes.extend(table.class_sizes.iter().map(|s| s.to_string()));
    rows.push(sizes);
    for (r, &name) in table.row_names.iter().enumerate() {
        let mut row = vec![name.label()];
        row.extend(table.values[r].iter().map(|v| v.to_string()));
        rows.push(row);
    }
    for (label, chi) in extra {
        let mut row = vec![label.clone()];
        row.extend(chi.values.iter().map(|v| v.to_string()));
        rows.push(row);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap())
        .collect();
    rows.iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .map(|(c, cell)| format!("{:>width$}", cell, width = widths[c]))
                .collect::<Vec<_>>()
                .join("  ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// The permutation matrices of a coset action, as exact rational matrices.
pub fn permutation_matrices(perms: &[Vec<usize>]) -> Vec<QMat> {
    perms.iter().map(|p| QMat::permutation(p)).collect()
}
