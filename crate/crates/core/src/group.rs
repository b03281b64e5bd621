//! Finite group layer: multiplication tables, subgroups, conjugacy classes,
//! coset actions, and the almost-conjugacy test that drives everything else.
//!
//! All arithmetic here is exact (usize indices into a multiplication table).

use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeSet;

/// A finite group given by its full multiplication table.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    pub order: usize,
    /// `mul[a][b]` is the index of the product a·b.
    pub mul: Vec<Vec<usize>>,
    pub identity: usize,
    pub inverse: Vec<usize>,
    /// Display name per element, e.g. "s^3·tu".
    pub names: Vec<String>,
}

/// Subgroup as a sorted list of element indices, validated on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    pub elements: Vec<usize>,
}

/// Left action of chosen generators on the left cosets gH.
///
/// Cosets are numbered by an explicit transversal when one is given (the
/// surface constructions use s^0..s^7 so that vertex i is the coset s^i·H),
/// otherwise by ascending minimal element.
#[derive(Debug, Clone)]
pub struct CosetAction {
    pub coset_count: usize,
    /// Canonical representative of each coset.
    pub reps: Vec<usize>,
    /// One permutation per generator: `perm[k][c]` is where generator k sends coset c.
    pub perms: Vec<Vec<usize>>,
    /// The generator elements, parallel to `perms`.
    pub generators: Vec<usize>,
}

/// Outcome of the almost-conjugacy check, with enough data to audit it.
#[derive(Debug, Clone, Serialize)]
pub struct AlmostConjugacyReport {
    pub almost_conjugate: bool,
    pub conjugate_as_subgroups: bool,
    /// Per conjugacy class: (class representative name, |class ∩ H1|, |class ∩ H2|).
    pub class_counts: Vec<(String, usize, usize)>,
    /// For each element of H1 (when almost conjugate): (h1, g, g·h1·g⁻¹ ∈ H2) by name.
    pub matching: Vec<(String, String, String)>,
    /// First class where the counts disagree, if any.
    pub failing_class: Option<String>,
}

impl FiniteGroup {
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != self.identity {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    /// Conjugacy classes, each sorted, ordered by their minimal element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut classes = Vec::new();
        for x in 0..self.order {
            if seen[x] {
                continue;
            }
            let mut class: BTreeSet<usize> = BTreeSet::new();
            for g in 0..self.order {
                class.insert(self.conjugate(g, x));
            }
            for &y in &class {
                seen[y] = true;
            }
            classes.push(class.into_iter().collect());
        }
        classes
    }

    /// Index of the conjugacy class containing each element.
    pub fn class_index(&self) -> (Vec<Vec<usize>>, Vec<usize>) {
        let classes = self.conjugacy_classes();
        let mut idx = vec![0; self.order];
        for (k, c) in classes.iter().enumerate() {
            for &x in c {
                idx[x] = k;
            }
        }
        (classes, idx)
    }

    /// Subgroup generated by a set of elements.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Subgroup {
        let mut set: BTreeSet<usize> = BTreeSet::new();
        set.insert(self.identity);
        let mut frontier: Vec<usize> = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                for y in [self.mul(x, g), self.mul(g, x)] {
                    if set.insert(y) {
                        frontier.push(y);
                    }
                }
            }
        }
        Subgroup {
            elements: set.into_iter().collect(),
        }
    }
}

impl Subgroup {
    /// Validates closure, identity, and inverses.
    pub fn new(group: &FiniteGroup, elements: &[usize]) -> Result<Self> {
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        if !set.contains(&group.identity) {
            return Err(Error::NotASubgroup("missing identity".into()));
        }
        for &a in &set {
            if !set.contains(&group.inv(a)) {
                return Err(Error::NotASubgroup(format!(
                    "missing inverse of {}",
                    group.name(a)
                )));
            }
            for &b in &set {
                if !set.contains(&group.mul(a, b)) {
                    return Err(Error::NotASubgroup(format!(
                        "not closed: {}·{}",
                        group.name(a),
                        group.name(b)
                    )));
                }
            }
        }
        Ok(Subgroup {
            elements: set.into_iter().collect(),
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }
}

/// Encoding of the order-32 Gerst group Z8 ⋊ (Z2 × Z2).
///
/// Element (i, h) with i ∈ Z8 and h ∈ {0,1,2,3} for {1, t, u, tu} is the index
/// 4i + h, so s^i = 4i, t = 1, u = 2, tu = 3.  The Klein factor acts on Z8 by
/// t: j ↦ 7j, u: j ↦ 3j, tu: j ↦ 5j, giving
/// (i1,h1)·(i2,h2) = (i1 + act(h1)·i2 mod 8, h1 xor h2).
pub mod gerst {
    use super::*;

    pub const S: usize = 4;
    pub const T: usize = 1;
    pub const U: usize = 2;
    pub const TU: usize = 3;
    /// σ = s·t, the edge-pairing involution used by the surface constructions.
    pub const ST: usize = 5;

    const ACT: [usize; 4] = [1, 7, 3, 5];

    pub fn encode(i: usize, h: usize) -> usize {
        4 * (i % 8) + (h % 4)
    }

    pub fn decode(x: usize) -> (usize, usize) {
        (x / 4, x % 4)
    }

    fn name_of(i: usize, h: usize) -> String {
        let klein = ["", "t", "u", "tu"][h];
        match (i, klein) {
            (0, "") => "1".to_string(),
            (0, k) => k.to_string(),
            (1, "") => "s".to_string(),
            (1, k) => format!("s·{k}"),
            (p, "") => format!("s^{p}"),
            (p, k) => format!("s^{p}·{k}"),
        }
    }

    /// The group itself.
    pub fn group() -> FiniteGroup {
        let order = 32;
        let mut mul = vec![vec![0usize; order]; order];
        for x in 0..order {
            let (i1, h1) = decode(x);
            for y in 0..order {
                let (i2, h2) = decode(y);
                mul[x][y] = encode(i1 + ACT[h1] * i2, h1 ^ h2);
            }
        }
        let identity = 0;
        let mut inverse = vec![0usize; order];
        for x in 0..order {
            let (i, h) = decode(x);
            // Klein elements are involutions and ACT[h] is self-inverse mod 8.
            inverse[x] = encode(8 - (ACT[h] * i) % 8, h);
        }
        let names = (0..order)
            .map(|x| {
                let (i, h) = decode(x);
                name_of(i, h)
            })
            .collect();
        FiniteGroup {
            order,
            mul,
            identity,
            inverse,
            names,
        }
    }

    /// Γ1 = {1, t, u, tu}.
    pub fn gamma1(g: &FiniteGroup) -> Subgroup {
        Subgroup::new(g, &[0, T, U, TU]).expect("Γ1 is closed")
    }

    /// Γ2 = {1, t, s⁴u, s⁴tu}.
    pub fn gamma2(g: &FiniteGroup) -> Subgroup {
        Subgroup::new(g, &[0, T, encode(4, 2), encode(4, 3)]).expect("Γ2 is closed")
    }

    /// ⟨s⟩ ≅ Z8, a size-8 subgroup that is not almost conjugate to Γ1.
    pub fn cyclic8(g: &FiniteGroup) -> Subgroup {
        g.generated_subgroup(&[S])
    }

    /// s^0..s^7: hits each coset of Γ1, Γ2 once, so vertex i is the coset s^i·Γ.
    pub fn s_transversal() -> Vec<usize> {
        (0..8).map(|i| encode(i, 0)).collect()
    }

    pub fn subgroup_by_name(g: &FiniteGroup, name: &str) -> Result<Subgroup> {
        match name {
            "gamma1" => Ok(gamma1(g)),
            "gamma2" => Ok(gamma2(g)),
            "cyclic8" => Ok(cyclic8(g)),
            other => Err(Error::UnknownName(other.into())),
        }
    }

    pub fn element_by_name(name: &str) -> Result<usize> {
        match name {
            "1" => Ok(0),
            "s" => Ok(S),
            "t" => Ok(T),
            "u" => Ok(U),
            "tu" => Ok(TU),
            "st" | "sigma" => Ok(ST),
            other => Err(Error::UnknownName(other.into())),
        }
    }
}

/// Minimal element of each coset gH, indexed by g.
fn coset_min_table(group: &FiniteGroup, h: &Subgroup) -> Vec<usize> {
    (0..group.order)
        .map(|g| {
            h.elements
                .iter()
                .map(|&x| group.mul(g, x))
                .min()
                .expect("nonempty subgroup")
        })
        .collect()
}

/// Left action of `generators` on the left cosets of `h`.
///
/// Every generator must be an involution: the induced permutation then pairs
/// cosets into gluings or fixes them (half-edges).  `transversal`, when given,
/// fixes the coset numbering (element k's coset gets id k); it must hit every
/// coset exactly once.
pub fn coset_action(
    group: &FiniteGroup,
    h: &Subgroup,
    generators: &[usize],
    transversal: Option<&[usize]>,
) -> Result<CosetAction> {
    for &r in generators {
        if r == group.identity || group.mul(r, r) != group.identity {
            return Err(Error::NonInvolutiveGenerator(group.name(r).to_string()));
        }
    }
    let coset_min = coset_min_table(group, h);
    let mut mins: Vec<usize> = coset_min
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    mins.sort_unstable();

    // reps[c] is the canonical representative of coset c.
    let reps: Vec<usize> = match transversal {
        Some(tv) => {
            if tv.len() != mins.len() {
                return Err(Error::NotTransitive);
            }
            let covered: BTreeSet<usize> = tv.iter().map(|&g| coset_min[g]).collect();
            if covered.len() != mins.len() {
                return Err(Error::NotTransitive);
            }
            tv.to_vec()
        }
        None => mins.clone(),
    };
    let min_to_id: Vec<(usize, usize)> = {
        let mut v: Vec<(usize, usize)> = reps
            .iter()
            .enumerate()
            .map(|(c, &rep)| (coset_min[rep], c))
            .collect();
        v.sort_unstable();
        v
    };
    let coset_of = |g: usize| -> usize {
        let m = coset_min[g];
        let k = min_to_id.binary_search_by_key(&m, |&(m, _)| m).unwrap();
        min_to_id[k].1
    };

    let coset_count = reps.len();
    let mut perms = Vec::with_capacity(generators.len());
    for &r in generators {
        let mut p = vec![0usize; coset_count];
        for (c, &rep) in reps.iter().enumerate() {
            p[c] = coset_of(group.mul(r, rep));
        }
        perms.push(p);
    }
    Ok(CosetAction {
        coset_count,
        reps,
        perms,
        generators: generators.to_vec(),
    })
}

impl CosetAction {
    /// Whether the generators reach every coset from coset 0.
    pub fn is_transitive(&self) -> bool {
        let mut seen = vec![false; self.coset_count];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(c) = stack.pop() {
            for p in &self.perms {
                let d = p[c];
                if !seen[d] {
                    seen[d] = true;
                    stack.push(d);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }
}

/// Permutation of cosets induced by a single element (not necessarily an
/// involution), on the same numbering as `coset_action` with the transversal.
pub fn coset_permutation(
    group: &FiniteGroup,
    h: &Subgroup,
    g: usize,
    transversal: Option<&[usize]>,
) -> Vec<usize> {
    let coset_min = coset_min_table(group, h);
    let reps: Vec<usize> = match transversal {
        Some(tv) => tv.to_vec(),
        None => coset_min
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    let min_to_id: Vec<(usize, usize)> = {
        let mut v: Vec<(usize, usize)> = reps
            .iter()
            .enumerate()
            .map(|(c, &rep)| (coset_min[rep], c))
            .collect();
        v.sort_unstable();
        v
    };
    reps.iter()
        .map(|&rep| {
            let m = coset_min[group.mul(g, rep)];
            let k = min_to_id.binary_search_by_key(&m, |&(m, _)| m).unwrap();
            min_to_id[k].1
        })
        .collect()
}

/// Exhaustive test for conjugacy of subgroups: some g with g·H1·g⁻¹ = H2.
pub fn are_conjugate_subgroups(group: &FiniteGroup, h1: &Subgroup, h2: &Subgroup) -> bool {
    if h1.order() != h2.order() {
        return false;
    }
    let target: BTreeSet<usize> = h2.elements.iter().copied().collect();
    (0..group.order).any(|g| {
        h1.elements
            .iter()
            .map(|&x| group.conjugate(g, x))
            .collect::<BTreeSet<usize>>()
            == target
    })
}

/// Class-by-class intersection counts, the Gassmann condition.
pub fn almost_conjugate(
    group: &FiniteGroup,
    h1: &Subgroup,
    h2: &Subgroup,
) -> AlmostConjugacyReport {
    let (classes, class_of) = group.class_index();
    let mut class_counts = Vec::with_capacity(classes.len());
    let mut failing_class = None;
    let mut ok = h1.order() == h2.order();
    for (k, class) in classes.iter().enumerate() {
        let c1 = h1.elements.iter().filter(|&&x| class_of[x] == k).count();
        let c2 = h2.elements.iter().filter(|&&x| class_of[x] == k).count();
        let rep_name = group.name(class[0]).to_string();
        if c1 != c2 && failing_class.is_none() {
            failing_class = Some(rep_name.clone());
            ok = false;
        }
        class_counts.push((rep_name, c1, c2));
    }

    // Element-by-element matching within classes, with explicit conjugators.
    let mut matching = Vec::new();
    if ok {
        let mut used = vec![false; h2.order()];
        'outer: for &x in &h1.elements {
            for (j, &y) in h2.elements.iter().enumerate() {
                if used[j] || class_of[y] != class_of[x] {
                    continue;
                }
                if let Some(g) = (0..group.order).find(|&g| group.conjugate(g, x) == y) {
                    used[j] = true;
                    matching.push((
                        group.name(x).to_string(),
                        group.name(g).to_string(),
                        group.name(y).to_string(),
                    ));
                    continue 'outer;
                }
            }
            // Same class counts guarantee a partner exists; this is unreachable.
            ok = false;
            break;
        }
    }

    AlmostConjugacyReport {
        almost_conjugate: ok,
        conjugate_as_subgroups: are_conjugate_subgroups(group, h1, h2),
        class_counts,
        matching,
        failing_class,
    }
}
