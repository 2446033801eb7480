//! Truncated Fock representations via Jordan–Wigner qubit chains.
//!
//! Each sector keeps the modes with |index| ≤ cutoff and represents them on a
//! chain of qubits, one per independent annihilator:
//!
//! * **Real NS**: annihilators ψ_m, m = 1/2, …, cutoff (creators are the
//!   adjoints ψ_{−m}); site s carries mode s + 1/2.
//! * **n-component complex NS**: annihilators φ⁽ᵏ⁾_ν, ν > 0, k = 1..n, with
//!   φ⁽ᵏ⁾_{−ν} = (φ⁽ⁿ⁺¹⁻ᵏ⁾_ν)*; sites are grouped by ν ascending, k inside.
//! * **Ramond**: the self-adjoint zero mode ψ₀ sits on the *first* site as
//!   (a₀ + a₀*)/√2 — no string crosses it, and every other mode's string
//!   covers it, which is exactly what {ψ₀, ψ_m} = 0 and ψ₀² = 1/2 need;
//!   sites s ≥ 1 carry modes m = s.
//!
//! The truncated operators are compressions P A P of the exact ones onto the
//! kept-mode subspace. Linear identities between such compressions hold on
//! the whole truncated space; identities involving *products* (commutators,
//! exponentials) hold exactly on low-energy windows: a product A B is exact
//! on states whose energy keeps B's image inside the space wherever A can
//! still act, so each suite states the window E ≤ cutoff − (max energy
//! transfer) it verifies on (see [`FockSpace::window_masks`]).
//!
//! Basis states are bit masks (bit s = site s occupied); the Jordan–Wigner
//! sign of site s on a mask is (−1)^{#occupied sites below s}.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::numeric::expm;
use crate::poly::{Gen, ModePolynomial};
use crate::{C64, Error, HalfInt, ONE, ZERO};

/// Which CAR algebra a space represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    /// Single real NS fermion, modes |m| ≤ cutoff (half-odd).
    RealNs { cutoff: HalfInt },
    /// n-component complex NS family, modes |ν| ≤ cutoff (half-odd).
    MultiNs { n: u32, cutoff: HalfInt },
    /// Single real fermion with periodic (integer) modes |m| ≤ cutoff.
    Ramond { cutoff: i64 },
}

/// A sparse vector in the truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    amps: BTreeMap<u64, C64>,
}

impl State {
    pub fn zero() -> Self {
        State {
            amps: BTreeMap::new(),
        }
    }

    /// The basis vector for a mask.
    pub fn basis(mask: u64) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(mask, ONE);
        State { amps }
    }

    pub fn amp(&self, mask: u64) -> C64 {
        self.amps.get(&mask).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u64, &C64)> {
        self.amps.iter()
    }

    pub fn support_len(&self) -> usize {
        self.amps.len()
    }

    pub fn insert_add(&mut self, mask: u64, c: C64) {
        let entry = self.amps.entry(mask).or_insert(ZERO);
        *entry += c;
        if entry.norm() == 0.0 {
            self.amps.remove(&mask);
        }
    }

    pub fn add_scaled(&mut self, other: &State, c: C64) {
        for (&m, &a) in other.amps.iter() {
            self.insert_add(m, a * c);
        }
    }

    pub fn scale(&mut self, c: C64) {
        for a in self.amps.values_mut() {
            *a *= c;
        }
    }

    /// ⟨self | other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &State) -> C64 {
        let (small, big, conj_small) = if self.amps.len() <= other.amps.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = ZERO;
        for (m, a) in small.amps.iter() {
            if let Some(b) = big.amps.get(m) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.sqrt()
    }

    /// Max amplitude magnitude.
    pub fn max_abs(&self) -> f64 {
        self.amps.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drop amplitudes below `eps` (absolute).
    pub fn prune(&mut self, eps: f64) {
        self.amps.retain(|_, c| c.norm() > eps);
    }
}

/// A truncated Fock space with its site layout.
#[derive(Debug, Clone)]
pub struct FockSpace {
    kind: SpaceKind,
    /// Energy carried by each site's creator (ascending).
    site_energy: Vec<HalfInt>,
}

/// What a generator does on the chain.
enum SiteAction {
    Annihilate(usize),
    Create(usize),
    /// Ramond zero mode: (a₀ + a₀*)/√2 on the given site.
    ZeroMode(usize),
}

impl FockSpace {
    pub fn real_ns(cutoff: HalfInt) -> Result<Self, Error> {
        if !cutoff.is_half_odd() || !cutoff.is_positive() {
            return Err(Error::BadModeIndex {
                index: cutoff,
                reason: "NS cutoff must be positive and half-odd".into(),
            });
        }
        let count = ((cutoff.twice() + 1) / 2) as usize;
        let site_energy = (0..count)
            .map(|s| HalfInt::int_plus_half(s as i64))
            .collect();
        Ok(FockSpace {
            kind: SpaceKind::RealNs { cutoff },
            site_energy,
        })
    }

    pub fn multi_ns(n: u32, cutoff: HalfInt) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::Dimension("family size n must be positive".into()));
        }
        if !cutoff.is_half_odd() || !cutoff.is_positive() {
            return Err(Error::BadModeIndex {
                index: cutoff,
                reason: "NS cutoff must be positive and half-odd".into(),
            });
        }
        let levels = ((cutoff.twice() + 1) / 2) as usize;
        let mut site_energy = Vec::with_capacity(levels * n as usize);
        for t in 0..levels {
            for _k in 0..n {
                site_energy.push(HalfInt::int_plus_half(t as i64));
            }
        }
        Ok(FockSpace {
            kind: SpaceKind::MultiNs { n, cutoff },
            site_energy,
        })
    }

    pub fn ramond(cutoff: i64) -> Result<Self, Error> {
        if cutoff < 0 {
            return Err(Error::BadModeIndex {
                index: HalfInt::from_int(cutoff),
                reason: "Ramond cutoff must be ≥ 0".into(),
            });
        }
        let site_energy = (0..=cutoff).map(HalfInt::from_int).collect();
        Ok(FockSpace {
            kind: SpaceKind::Ramond { cutoff },
            site_energy,
        })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn num_sites(&self) -> usize {
        self.site_energy.len()
    }

    /// Dimension 2^sites of the truncated space.
    pub fn dim(&self) -> u64 {
        1u64 << self.num_sites()
    }

    pub fn vacuum(&self) -> State {
        State::basis(0)
    }

    /// Energy (L₀ eigenvalue relative to the vacuum) of a basis mask.
    pub fn energy_of_mask(&self, mask: u64) -> HalfInt {
        let mut e = HalfInt::ZERO;
        for (s, en) in self.site_energy.iter().enumerate() {
            if mask >> s & 1 == 1 {
                e += *en;
            }
        }
        e
    }

    fn site_action(&self, g: &Gen) -> Result<SiteAction, Error> {
        g.validate()?;
        match (self.kind, *g) {
            (SpaceKind::RealNs { cutoff }, Gen::Psi(m)) => {
                if m.abs() > cutoff {
                    return Err(Error::BadModeIndex {
                        index: m,
                        reason: format!("above cutoff {cutoff}"),
                    });
                }
                let site = ((m.abs().twice() - 1) / 2) as usize;
                Ok(if m.is_positive() {
                    SiteAction::Annihilate(site)
                } else {
                    SiteAction::Create(site)
                })
            }
            (SpaceKind::MultiNs { n, cutoff }, Gen::MultiPhi { n: n2, k, nu }) => {
                if n != n2 {
                    return Err(Error::Dimension(format!(
                        "generator family n = {n2} in a space with n = {n}"
                    )));
                }
                if nu.abs() > cutoff {
                    return Err(Error::BadModeIndex {
                        index: nu,
                        reason: format!("above cutoff {cutoff}"),
                    });
                }
                if nu.is_positive() {
                    let t = ((nu.twice() - 1) / 2) as usize;
                    Ok(SiteAction::Annihilate(t * n as usize + (k as usize - 1)))
                } else {
                    // φ⁽ᵏ⁾_ν = (φ⁽ⁿ⁺¹⁻ᵏ⁾_{−ν})* creates the conjugate site.
                    let t = ((-nu).twice() as usize - 1) / 2;
                    let kc = (n + 1 - k) as usize;
                    Ok(SiteAction::Create(t * n as usize + (kc - 1)))
                }
            }
            (SpaceKind::Ramond { cutoff }, Gen::PsiR(m)) => {
                let mi = m.as_integer()?;
                if mi.abs() > cutoff {
                    return Err(Error::BadModeIndex {
                        index: m,
                        reason: format!("above cutoff {cutoff}"),
                    });
                }
                if mi == 0 {
                    Ok(SiteAction::ZeroMode(0))
                } else if mi > 0 {
                    Ok(SiteAction::Annihilate(mi as usize))
                } else {
                    Ok(SiteAction::Create((-mi) as usize))
                }
            }
            (_, g) => Err(Error::Dimension(format!(
                "generator {g} does not act on a {:?} space",
                self.kind
            ))),
        }
    }

    /// Jordan–Wigner sign: parity of occupied sites strictly below `site`.
    fn jw_sign(mask: u64, site: usize) -> f64 {
        let below = mask & ((1u64 << site) - 1);
        if below.count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Apply one generator to a state.
    pub fn apply_gen(&self, g: &Gen, st: &State) -> Result<State, Error> {
        let action = self.site_action(g)?;
        let mut out = State::zero();
        match action {
            SiteAction::Annihilate(s) => {
                for (&mask, &a) in st.amps.iter() {
                    if mask >> s & 1 == 1 {
                        out.insert_add(mask & !(1 << s), a * Self::jw_sign(mask, s));
                    }
                }
            }
            SiteAction::Create(s) => {
                for (&mask, &a) in st.amps.iter() {
                    if mask >> s & 1 == 0 {
                        out.insert_add(mask | 1 << s, a * Self::jw_sign(mask, s));
                    }
                }
            }
            SiteAction::ZeroMode(s) => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                for (&mask, &a) in st.amps.iter() {
                    // (a₀ + a₀*)/√2 flips the occupation; site 0 has no string.
                    out.insert_add(mask ^ (1 << s), a * r * Self::jw_sign(mask, s));
                }
            }
        }
        Ok(out)
    }

    /// Apply an ordered product (rightmost factor first).
    pub fn apply_monomial(&self, c: C64, gens: &[Gen], st: &State) -> Result<State, Error> {
        let mut cur = st.clone();
        for g in gens.iter().rev() {
            cur = self.apply_gen(g, &cur)?;
            if cur.amps.is_empty() {
                break;
            }
        }
        cur.scale(c);
        Ok(cur)
    }

    /// Apply a mode polynomial.
    pub fn apply_poly(&self, p: &ModePolynomial, st: &State) -> Result<State, Error> {
        let mut out = State::zero();
        for (c, m) in p.terms() {
            let piece = self.apply_monomial(*c, m, st)?;
            out.add_scaled(&piece, ONE);
        }
        Ok(out)
    }

    /// Vacuum expectation ⟨Ω P Ω⟩.
    pub fn vev(&self, p: &ModePolynomial) -> Result<C64, Error> {
        Ok(self.apply_poly(p, &self.vacuum())?.amp(0))
    }

    /// All basis masks (ascending). Guarded against huge spaces.
    pub fn basis_masks(&self) -> Vec<u64> {
        assert!(
            self.num_sites() <= 22,
            "full basis enumeration capped at 22 sites, space has {}",
            self.num_sites()
        );
        (0..self.dim()).collect()
    }

    /// Masks with energy ≤ `e_max`, ascending; sites are energy-sorted so the
    /// depth-first enumeration prunes whole subtrees.
    pub fn window_masks(&self, e_max: HalfInt) -> Vec<u64> {
        let mut out = Vec::new();
        let n = self.num_sites();
        // DFS over sites in ascending energy; the remaining minimum is the
        // next site's energy, so once the budget is exceeded we can stop.
        fn dfs(
            site: usize,
            n: usize,
            mask: u64,
            used: HalfInt,
            e_max: HalfInt,
            energy: &[HalfInt],
            out: &mut Vec<u64>,
        ) {
            out.push(mask);
            for s in site..n {
                let e = used + energy[s];
                if e > e_max {
                    break; // energies ascend: later sites only cost more
                }
                dfs(s + 1, n, mask | 1 << s, e, e_max, energy, out);
            }
        }
        dfs(0, n, 0, HalfInt::ZERO, e_max, &self.site_energy, &mut out);
        out.sort_unstable();
        out
    }

    /// Basis masks grouped by energy (full enumeration).
    pub fn energy_blocks(&self) -> BTreeMap<HalfInt, Vec<u64>> {
        let mut blocks: BTreeMap<HalfInt, Vec<u64>> = BTreeMap::new();
        for mask in self.basis_masks() {
            blocks.entry(self.energy_of_mask(mask)).or_default().push(mask);
        }
        blocks
    }

    /// Compression ⟨e_i P e_j⟩ of a polynomial onto a basis window.
    pub fn matrix_in_basis(&self, p: &ModePolynomial, basis: &[u64]) -> Result<DMatrix<C64>, Error> {
        let index: BTreeMap<u64, usize> = basis.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let d = basis.len();
        let mut mat = DMatrix::<C64>::zeros(d, d);
        for (j, &mask) in basis.iter().enumerate() {
            let col = self.apply_poly(p, &State::basis(mask))?;
            for (&m, &a) in col.amps.iter() {
                if let Some(&i) = index.get(&m) {
                    mat[(i, j)] += a;
                }
            }
        }
        Ok(mat)
    }

    /// exp(P) for an energy-preserving polynomial, as dense blocks per energy
    /// level. Every monomial must have zero net index sum (checked), which
    /// makes the blocks exactly invariant — the exponential is then exact on
    /// the whole truncated space, not just a window.
    pub fn energy_preserving_exp(&self, p: &ModePolynomial) -> Result<BlockUnitary, Error> {
        for (_, m) in p.terms() {
            let shift: HalfInt = m.iter().map(|g| g.index()).sum();
            if shift != HalfInt::ZERO {
                return Err(Error::Dimension(format!(
                    "energy_preserving_exp needs zero net index per monomial, found shift {shift}"
                )));
            }
        }
        let mut blocks = Vec::new();
        let mut index = BTreeMap::new();
        for (_e, masks) in self.energy_blocks() {
            let mat = self.matrix_in_basis(p, &masks)?;
            let u = expm(&mat);
            for (pos, &m) in masks.iter().enumerate() {
                index.insert(m, (blocks.len(), pos));
            }
            blocks.push((masks, u));
        }
        Ok(BlockUnitary { blocks, index })
    }
}

/// A block-diagonal operator (one dense block per energy level), typically
/// the exponential of an energy-preserving generator.
pub struct BlockUnitary {
    blocks: Vec<(Vec<u64>, DMatrix<C64>)>,
    index: BTreeMap<u64, (usize, usize)>,
}

impl BlockUnitary {
    /// U · st.
    pub fn apply(&self, st: &State) -> State {
        self.apply_impl(st, false)
    }

    /// U† · st.
    pub fn apply_adjoint(&self, st: &State) -> State {
        self.apply_impl(st, true)
    }

    fn apply_impl(&self, st: &State, adjoint: bool) -> State {
        // Gather per-block coordinates of st, multiply, scatter.
        let mut per_block: BTreeMap<usize, Vec<(usize, C64)>> = BTreeMap::new();
        for (&mask, &a) in st.iter() {
            let &(b, pos) = self
                .index
                .get(&mask)
                .expect("state leaves the block basis of this operator");
            per_block.entry(b).or_default().push((pos, a));
        }
        let mut out = State::zero();
        for (b, entries) in per_block {
            let (masks, u) = &self.blocks[b];
            let d = masks.len();
            let mut x = nalgebra::DVector::<C64>::zeros(d);
            for (pos, a) in entries {
                x[pos] = a;
            }
            let y = if adjoint { u.adjoint() * x } else { u * x };
            for (pos, &mask) in masks.iter().enumerate() {
                if y[pos] != ZERO {
                    out.insert_add(mask, y[pos]);
                }
            }
        }
        out
    }

    /// Max unitarity defect across blocks.
    pub fn unitarity_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|(_, u)| crate::numeric::unitarity_defect(u))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wick;
    use nalgebra::DMatrix;

    fn h(t: i64) -> HalfInt {
        HalfInt::from_twice(t)
    }

    /// Check {a, b} = car_pair(a,b)·1 as operators on every basis state.
    fn car_check_all(space: &FockSpace, gens: &[Gen]) {
        for a in gens {
            for b in gens {
                let pair = a.car_pair(b).expect("same algebra");
                for mask in space.basis_masks() {
                    let st = State::basis(mask);
                    let ab = space
                        .apply_gen(a, &space.apply_gen(b, &st).unwrap())
                        .unwrap();
                    let mut acc = ab;
                    let ba = space
                        .apply_gen(b, &space.apply_gen(a, &st).unwrap())
                        .unwrap();
                    acc.add_scaled(&ba, ONE);
                    acc.add_scaled(&st, C64::new(-pair, 0.0));
                    assert!(
                        acc.max_abs() < 1e-14,
                        "{{{a}, {b}}} ≠ {pair} on mask {mask:b}"
                    );
                }
            }
        }
    }

    #[test]
    fn car_relations_real_ns() {
        let space = FockSpace::real_ns(h(5)).unwrap();
        let gens: Vec<Gen> = crate::halfint::ns_indices(h(5))
            .into_iter()
            .map(Gen::Psi)
            .collect();
        car_check_all(&space, &gens);
    }

    #[test]
    fn car_relations_multi_ns() {
        for n in [2u32, 3] {
            let space = FockSpace::multi_ns(n, h(3)).unwrap();
            let mut gens = Vec::new();
            for k in 1..=n {
                for nu in crate::halfint::ns_indices(h(3)) {
                    gens.push(Gen::MultiPhi { n, k, nu });
                }
            }
            car_check_all(&space, &gens);
        }
    }

    #[test]
    fn car_relations_ramond_including_zero_mode() {
        let space = FockSpace::ramond(2).unwrap();
        let gens: Vec<Gen> = crate::halfint::ramond_indices(2)
            .into_iter()
            .map(Gen::PsiR)
            .collect();
        car_check_all(&space, &gens);
    }

    #[test]
    fn adjoints_match_inner_products() {
        let space = FockSpace::real_ns(h(5)).unwrap();
        let mut u = State::zero();
        u.insert_add(0b011, C64::new(0.3, 0.1));
        u.insert_add(0b100, C64::new(-0.2, 0.7));
        let mut v = State::zero();
        v.insert_add(0b110, C64::new(1.0, -0.4));
        v.insert_add(0b001, C64::new(0.5, 0.0));
        for m in crate::halfint::ns_indices(h(5)) {
            let g = Gen::Psi(m);
            let lhs = u.inner(&space.apply_gen(&g, &v).unwrap());
            let rhs = space.apply_gen(&g.adjoint(), &u).unwrap().inner(&v);
            assert!((lhs - rhs).norm() < 1e-14, "mode {m}");
        }
    }

    #[test]
    fn vacuum_is_annihilated_by_positive_modes() {
        let space = FockSpace::real_ns(h(7)).unwrap();
        for m in crate::halfint::ns_indices(h(7)) {
            let out = space.apply_gen(&Gen::Psi(m), &space.vacuum()).unwrap();
            if m.is_positive() {
                assert_eq!(out.support_len(), 0, "ψ_{m} should kill the vacuum");
            } else {
                assert_eq!(out.support_len(), 1);
            }
        }
    }

    #[test]
    fn fock_pair_vevs_match_the_abstract_pairing() {
        let space = FockSpace::multi_ns(2, h(5)).unwrap();
        let mut gens = Vec::new();
        for k in 1..=2 {
            for nu in crate::halfint::ns_indices(h(5)) {
                gens.push(Gen::MultiPhi { n: 2, k, nu });
            }
        }
        for a in &gens {
            for b in &gens {
                let expect = a.vacuum_pair(b).unwrap();
                let got = space
                    .vev(&ModePolynomial::monomial(ONE, vec![*a, *b]))
                    .unwrap();
                assert!(
                    (got - C64::new(expect, 0.0)).norm() < 1e-14,
                    "⟨{a} {b}⟩ = {got}, want {expect}"
                );
            }
        }
        // Ramond zero mode: ⟨ψ₀ ψ₀⟩ = 1/2.
        let rspace = FockSpace::ramond(1).unwrap();
        let z = Gen::PsiR(h(0));
        let got = rspace
            .vev(&ModePolynomial::monomial(ONE, vec![z, z]))
            .unwrap();
        assert!((got - C64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn four_point_vev_is_the_pairing_pfaffian() {
        // Wick's theorem ties the JW representation back to the Pfaffian
        // oracle at the level of exact mode pairings.
        let space = FockSpace::real_ns(h(7)).unwrap();
        let tuples = [
            [h(-1), h(-3), h(3), h(1)],
            [h(-5), h(-1), h(1), h(5)],
            [h(1), h(-1), h(3), h(-3)],
            [h(-7), h(5), h(-5), h(7)],
        ];
        for t in tuples {
            let gens: Vec<Gen> = t.iter().map(|&m| Gen::Psi(m)).collect();
            let got = space
                .vev(&ModePolynomial::monomial(ONE, gens.clone()))
                .unwrap();
            let mut a = DMatrix::<C64>::zeros(4, 4);
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let v = C64::new(gens[i].vacuum_pair(&gens[j]).unwrap(), 0.0);
                    a[(i, j)] = v;
                    a[(j, i)] = -v;
                }
            }
            let expect = wick::pfaffian(&a);
            assert!(
                (got - expect).norm() < 1e-13,
                "tuple {t:?}: fock {got} vs pfaffian {expect}"
            );
        }
    }

    #[test]
    fn window_enumeration_counts() {
        let space = FockSpace::real_ns(h(15)).unwrap();
        let w = space.window_masks(h(7));
        // States with Σm ≤ 7/2 over m ∈ {1/2,…,15/2}: ∅, {1/2}, {3/2}, {5/2},
        // {7/2}, {1/2,3/2}, {1/2,5/2}.
        assert_eq!(w.len(), 7);
        for &m in &w {
            assert!(space.energy_of_mask(m) <= h(7));
        }
        // The window is closed downward: removing any particle stays inside.
        for &m in &w {
            for s in 0..space.num_sites() {
                if m >> s & 1 == 1 {
                    assert!(w.binary_search(&(m & !(1 << s))).is_ok());
                }
            }
        }
    }

    #[test]
    fn energy_blocks_partition_the_space() {
        let space = FockSpace::multi_ns(2, h(3)).unwrap();
        let blocks = space.energy_blocks();
        let total: usize = blocks.values().map(|v| v.len()).sum();
        assert_eq!(total as u64, space.dim());
        for (e, masks) in blocks {
            for m in masks {
                assert_eq!(space.energy_of_mask(m), e);
            }
        }
    }

    #[test]
    fn block_exponential_matches_number_operator() {
        // P = c · ψ_{−1/2} ψ_{1/2} is the scaled number operator of site 0:
        // exp(P) multiplies occupied-site-0 states by e^c.
        let space = FockSpace::real_ns(h(5)).unwrap();
        let c = C64::new(0.0, 0.9);
        let p = ModePolynomial::monomial(c, vec![Gen::Psi(h(-1)), Gen::Psi(h(1))]);
        let u = space.energy_preserving_exp(&p).unwrap();
        assert!(u.unitarity_defect() < 1e-12);
        for mask in space.basis_masks() {
            let expect = if mask & 1 == 1 { c.exp() } else { ONE };
            let out = u.apply(&State::basis(mask));
            assert!((out.amp(mask) - expect).norm() < 1e-12, "mask {mask:b}");
            assert!(out.support_len() == 1);
        }
        // Round trip through the adjoint.
        let st = {
            let mut s = State::zero();
            s.insert_add(0b101, C64::new(0.6, 0.2));
            s.insert_add(0b011, C64::new(-0.1, 0.9));
            s
        };
        let round = u.apply_adjoint(&u.apply(&st));
        let mut diff = round;
        diff.add_scaled(&st, -ONE);
        assert!(diff.max_abs() < 1e-12);
    }

    #[test]
    fn energy_shifting_polynomials_are_rejected_by_block_exp() {
        let space = FockSpace::real_ns(h(5)).unwrap();
        let p = ModePolynomial::gen(Gen::Psi(h(1)));
        assert!(space.energy_preserving_exp(&p).is_err());
    }

    #[test]
    fn matrix_in_basis_is_the_compression() {
        let space = FockSpace::real_ns(h(3)).unwrap();
        let basis = space.basis_masks();
        let p = ModePolynomial::from_terms(vec![
            (C64::new(0.5, 0.0), vec![Gen::Psi(h(1))]),
            (C64::new(0.0, 1.0), vec![Gen::Psi(h(-3)), Gen::Psi(h(1))]),
        ]);
        let mat = space.matrix_in_basis(&p, &basis).unwrap();
        for (j, &mj) in basis.iter().enumerate() {
            let col = space.apply_poly(&p, &State::basis(mj)).unwrap();
            for (i, &mi) in basis.iter().enumerate() {
                assert!((mat[(i, j)] - col.amp(mi)).norm() < 1e-15);
            }
        }
    }
}
