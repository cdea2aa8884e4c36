//! Island database: behaviorally grouped sub-populations, each split into
//! clusters of equal (rounded) fitness.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SearchError;
use crate::behave::{sim_matrix, TrajComparator};
use crate::cluster::{agglomerate, Linkage};
use crate::types::ScoredAlgorithm;

/// Fitness key used to group members into clusters.
pub fn fitness_key(f: f64) -> f64 {
    (f * 1e9).round() / 1e9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessCluster {
    /// Rounded fitness shared by every member.
    pub fitness: f64,
    pub members: Vec<ScoredAlgorithm>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Island {
    pub clusters: Vec<FitnessCluster>,
}

impl Island {
    pub fn len(&self) -> usize {
        self.clusters.iter().map(|c| c.members.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn members(&self) -> impl Iterator<Item = &ScoredAlgorithm> {
        self.clusters.iter().flat_map(|c| c.members.iter())
    }

    pub fn insert(&mut self, cand: ScoredAlgorithm) {
        let key = fitness_key(cand.fitness);
        match self.clusters.iter_mut().find(|c| c.fitness == key) {
            Some(c) => c.members.push(cand),
            None => self.clusters.push(FitnessCluster {
                fitness: key,
                members: vec![cand],
            }),
        }
    }

    /// Lowest-fitness member; ties to the first in cluster order.
    pub fn best(&self) -> Option<&ScoredAlgorithm> {
        self.members().fold(None, |b: Option<&ScoredAlgorithm>, m| match b {
            Some(b) if b.fitness <= m.fitness => Some(b),
            _ => Some(m),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionKind {
    S1,
    S2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub kind: SelectionKind,
    /// Source island of each parent.
    pub islands: [usize; 2],
    pub parents: [ScoredAlgorithm; 2],
    /// S1 was drawn but fewer than two islands were populated.
    pub fell_back: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatabaseParams {
    pub p_s1: f64,
    pub cluster_temp: f64,
    pub length_temp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IslandDatabase {
    pub islands: Vec<Island>,
    pub params: DatabaseParams,
}

type Slot = (usize, usize);

impl IslandDatabase {
    pub fn empty(n_isl: usize, params: DatabaseParams) -> Self {
        IslandDatabase {
            islands: vec![Island::default(); n_isl],
            params,
        }
    }

    /// Clusters the initial candidates on behavioral similarity (average
    /// linkage) into at most `n_isl` groups, one per island. Groups are only
    /// split at positive linkage distance; islands left over get a copy of the
    /// best candidate.
    pub fn from_initial(
        cands: Vec<ScoredAlgorithm>,
        n_isl: usize,
        params: DatabaseParams,
        cmp: &TrajComparator,
    ) -> Result<Self, SearchError> {
        if n_isl == 0 {
            return Err(SearchError::Config("n_isl must be positive".into()));
        }
        if cands.is_empty() {
            return Err(SearchError::EmptyPopulation);
        }
        let sim = sim_matrix(&cands, cmp)?;
        let labels: Vec<String> = (0..cands.len()).map(|i| i.to_string()).collect();
        let dendro = agglomerate(&sim, Linkage::Average, &labels)?;
        let zero_merges = dendro.merges.iter().filter(|m| m.distance <= 1e-12).count();
        let groups = cands.len() - zero_merges;
        let k = n_isl.min(groups);
        let parts = dendro.cut_k(k)?;
        let mut db = Self::empty(n_isl, params);
        for (island, part) in db.islands.iter_mut().zip(&parts) {
            for &i in part {
                island.insert(cands[i].clone());
            }
        }
        let best = cands
            .iter()
            .fold(&cands[0], |b, c| if c.fitness < b.fitness { c } else { b })
            .clone();
        for island in db.islands.iter_mut().skip(parts.len()) {
            island.insert(best.clone());
        }
        Ok(db)
    }

    pub fn len(&self) -> usize {
        self.islands.iter().map(Island::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn best(&self) -> Option<&ScoredAlgorithm> {
        self.islands
            .iter()
            .filter_map(Island::best)
            .fold(None, |b: Option<&ScoredAlgorithm>, m| match b {
                Some(b) if b.fitness <= m.fitness => Some(b),
                _ => Some(m),
            })
    }

    /// Boltzmann draw of a cluster (lower fitness preferred), then of a member
    /// (shorter text preferred), skipping `exclude`.
    fn sample_member<R: Rng + ?Sized>(&self, island: usize, exclude: Option<Slot>, rng: &mut R) -> Option<Slot> {
        let isl = &self.islands[island];
        let live = |ci: usize| {
            isl.clusters[ci]
                .members
                .iter()
                .enumerate()
                .filter(move |&(mi, _)| exclude != Some((ci, mi)))
                .map(|(mi, _)| mi)
        };
        let clusters: Vec<usize> = (0..isl.clusters.len()).filter(|&ci| live(ci).next().is_some()).collect();
        if clusters.is_empty() {
            return None;
        }
        let scores: Vec<f64> = clusters.iter().map(|&ci| -isl.clusters[ci].fitness).collect();
        let ci = clusters[boltzmann(&scores, self.params.cluster_temp, rng)];
        let members: Vec<usize> = live(ci).collect();
        let lens: Vec<f64> = members
            .iter()
            .map(|&mi| isl.clusters[ci].members[mi].spec.length_tokens as f64)
            .collect();
        let (lo, hi) = lens.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| (lo.min(l), hi.max(l)));
        let scores: Vec<f64> = lens.iter().map(|l| -(l - lo) / (hi - lo + 1e-6)).collect();
        let mi = members[boltzmann(&scores, self.params.length_temp, rng)];
        Some((ci, mi))
    }

    fn get(&self, island: usize, (ci, mi): Slot) -> &ScoredAlgorithm {
        &self.islands[island].clusters[ci].members[mi]
    }

    /// S1 with probability `p_s1` (one parent from each of two distinct
    /// islands), otherwise S2 (two distinct members of one island).
    pub fn select_parents<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Selection, SearchError> {
        let populated: Vec<usize> = (0..self.islands.len()).filter(|&i| !self.islands[i].is_empty()).collect();
        if populated.is_empty() {
            return Err(SearchError::EmptyPopulation);
        }
        let want_s1 = rng.random_bool(self.params.p_s1.clamp(0.0, 1.0));
        if want_s1 && populated.len() >= 2 {
            let a = rng.random_range(0..populated.len());
            let mut b = rng.random_range(0..populated.len() - 1);
            if b >= a {
                b += 1;
            }
            let (ia, ib) = (populated[a], populated[b]);
            let pa = self.sample_member(ia, None, rng).expect("populated");
            let pb = self.sample_member(ib, None, rng).expect("populated");
            return Ok(Selection {
                kind: SelectionKind::S1,
                islands: [ia, ib],
                parents: [self.get(ia, pa).clone(), self.get(ib, pb).clone()],
                fell_back: false,
            });
        }
        if want_s1 {
            log::info!("S1 needs two populated islands, falling back to S2");
        }
        let eligible: Vec<usize> = populated.iter().copied().filter(|&i| self.islands[i].len() >= 2).collect();
        if eligible.is_empty() {
            return Err(SearchError::InsufficientMembers);
        }
        let isl = eligible[rng.random_range(0..eligible.len())];
        let first = self.sample_member(isl, None, rng).expect("populated");
        let second = self.sample_member(isl, Some(first), rng).expect("two members");
        Ok(Selection {
            kind: SelectionKind::S2,
            islands: [isl, isl],
            parents: [self.get(isl, first).clone(), self.get(isl, second).clone()],
            fell_back: want_s1,
        })
    }

    /// Mean similarity of `cand` to the members of every island (`None` for
    /// empty islands).
    pub fn island_means(&self, cand: &ScoredAlgorithm, cmp: &TrajComparator) -> Result<Vec<Option<f64>>, SearchError> {
        let all: Vec<(usize, &ScoredAlgorithm)> = self
            .islands
            .iter()
            .enumerate()
            .flat_map(|(i, isl)| isl.members().map(move |m| (i, m)))
            .collect();
        for (_, m) in &all {
            if m.trajs.len() != cand.trajs.len() {
                return Err(SearchError::FingerprintMismatch(cand.trajs.len(), m.trajs.len()));
            }
        }
        let sims: Vec<f64> = all
            .par_iter()
            .map(|(_, m)| cmp.behave_sim_traj(&cand.trajs, &m.trajs))
            .collect::<Result<_, _>>()?;
        let mut sum = vec![0.0; self.islands.len()];
        let mut count = vec![0usize; self.islands.len()];
        for ((i, _), s) in all.iter().zip(sims) {
            sum[*i] += s;
            count[*i] += 1;
        }
        Ok(sum.iter().zip(&count).map(|(s, &c)| (c > 0).then(|| s / c as f64)).collect())
    }

    /// Inserts into the island of highest mean similarity (lowest index on
    /// ties) and returns that index.
    pub fn register(&mut self, cand: ScoredAlgorithm, cmp: &TrajComparator) -> Result<usize, SearchError> {
        let means = self.island_means(&cand, cmp)?;
        let mut target = 0;
        let mut best = f64::NEG_INFINITY;
        for (i, m) in means.iter().enumerate() {
            if let Some(m) = *m {
                if m > best {
                    best = m;
                    target = i;
                }
            }
        }
        self.islands[target].insert(cand);
        Ok(target)
    }

    pub fn insert_into(&mut self, island: usize, cand: ScoredAlgorithm) {
        self.islands[island].insert(cand);
    }

    /// Empties the worse half of the islands (by best member; lower index
    /// first among ties) and reseeds each with the best of a random
    /// survivor. Returns the reset island indices.
    pub fn restart_islands<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<usize> {
        let n = self.islands.len();
        if n < 2 {
            return vec![];
        }
        let score = |i: usize| self.islands[i].best().map_or(f64::INFINITY, |b| b.fitness);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| score(b).total_cmp(&score(a)).then(a.cmp(&b)));
        let mut reset: Vec<usize> = order[..n / 2].to_vec();
        reset.sort_unstable();
        let survivors: Vec<usize> = (0..n).filter(|i| !reset.contains(i) && !self.islands[*i].is_empty()).collect();
        if survivors.is_empty() {
            return vec![];
        }
        for &i in &reset {
            let donor = survivors[rng.random_range(0..survivors.len())];
            let best = self.islands[donor].best().expect("non-empty survivor").clone();
            self.islands[i] = Island::default();
            self.islands[i].insert(best);
        }
        reset
    }
}

fn boltzmann<R: Rng + ?Sized>(scores: &[f64], temp: f64, rng: &mut R) -> usize {
    if scores.len() == 1 {
        return 0;
    }
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = scores.iter().map(|s| ((s - max) / temp).exp()).collect();
    WeightedIndex::new(&w).expect("max weight is 1").sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Expr, FeatureId};
    use crate::trajsim::TrajSimConfig;
    use crate::types::{AlgorithmSpec, PsTraj, Solution, TrajMeta};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(p_s1: f64) -> DatabaseParams {
        DatabaseParams {
            p_s1,
            cluster_temp: 0.1,
            length_temp: 1.0,
        }
    }

    fn traj(v: &[f64]) -> PsTraj {
        PsTraj::new(v.iter().map(|&x| Solution::real(vec![x]).unwrap()).collect(), TrajMeta::default()).unwrap()
    }

    fn member(tag: f64, fitness: f64, birth: u64) -> ScoredAlgorithm {
        ScoredAlgorithm {
            spec: AlgorithmSpec::dsl(Expr::constant(birth as f64)),
            fitness,
            trajs: vec![traj(&[0.0, tag]), traj(&[tag, tag])],
            eval_count_at_birth: birth,
        }
    }

    fn cmp() -> TrajComparator {
        TrajComparator::uniform(TrajSimConfig::default())
    }

    #[test]
    fn single_island_always_registers_to_zero() {
        let mut db = IslandDatabase::empty(1, params(0.5));
        db.insert_into(0, member(0.1, 0.5, 0));
        assert_eq!(db.register(member(0.9, 0.2, 1), &cmp()).unwrap(), 0);
        assert_eq!(db.len(), 2);
    }

    #[test]
    fn clone_attracts_candidate() {
        let mut db = IslandDatabase::empty(2, params(0.5));
        db.insert_into(0, member(0.1, 0.5, 0));
        db.insert_into(1, member(0.9, 0.5, 1));
        assert_eq!(db.register(member(0.9, 0.3, 2), &cmp()).unwrap(), 1);
        assert_eq!(db.register(member(0.1, 0.3, 3), &cmp()).unwrap(), 0);
    }

    #[test]
    fn mismatched_fingerprint_rejected() {
        let mut db = IslandDatabase::empty(1, params(0.5));
        db.insert_into(0, member(0.1, 0.5, 0));
        let mut c = member(0.2, 0.1, 1);
        c.trajs.pop();
        assert_eq!(db.register(c, &cmp()), Err(SearchError::FingerprintMismatch(1, 2)));
    }

    #[test]
    fn clusters_group_equal_fitness() {
        let mut isl = Island::default();
        isl.insert(member(0.1, 0.3, 0));
        isl.insert(member(0.2, 0.3 + 1e-12, 1));
        isl.insert(member(0.3, 0.4, 2));
        assert_eq!(isl.clusters.len(), 2);
        assert_eq!(isl.clusters[0].members.len(), 2);
        assert_eq!(isl.best().unwrap().eval_count_at_birth, 0);
    }

    #[test]
    fn p_s1_zero_draws_within_one_island() {
        let mut db = IslandDatabase::empty(3, params(0.0));
        for i in 0..6 {
            db.insert_into(i % 3, member(i as f64 / 10.0, 0.1 * i as f64, i as u64));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let s = db.select_parents(&mut rng).unwrap();
            assert_eq!(s.kind, SelectionKind::S2);
            assert_eq!(s.islands[0], s.islands[1]);
            assert_ne!(s.parents[0].eval_count_at_birth, s.parents[1].eval_count_at_birth);
        }
    }

    #[test]
    fn s1_uses_two_islands_and_falls_back() {
        let mut db = IslandDatabase::empty(3, params(1.0));
        for i in 0..3 {
            db.insert_into(i, member(i as f64 / 10.0, 0.1, i as u64));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = db.select_parents(&mut rng).unwrap();
        assert_eq!(s.kind, SelectionKind::S1);
        assert_ne!(s.islands[0], s.islands[1]);

        let mut lone = IslandDatabase::empty(2, params(1.0));
        lone.insert_into(0, member(0.1, 0.1, 0));
        lone.insert_into(0, member(0.2, 0.2, 1));
        let s = lone.select_parents(&mut rng).unwrap();
        assert_eq!(s.kind, SelectionKind::S2);
        assert!(s.fell_back);
    }

    #[test]
    fn single_member_cannot_give_two_parents() {
        let mut db = IslandDatabase::empty(1, params(0.0));
        db.insert_into(0, member(0.1, 0.1, 0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(db.select_parents(&mut rng), Err(SearchError::InsufficientMembers));
    }

    #[test]
    fn cold_cluster_temperature_picks_best_cluster() {
        let mut db = IslandDatabase::empty(1, DatabaseParams {
            p_s1: 0.0,
            cluster_temp: 1e-4,
            length_temp: 1.0,
        });
        db.insert_into(0, member(0.1, 0.2, 0));
        db.insert_into(0, member(0.2, 0.5, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let hits = (0..10_000)
            .filter(|_| db.sample_member(0, None, &mut rng).map(|s| db.get(0, s).fitness) == Some(0.2))
            .count();
        assert!(hits as f64 / 10_000.0 >= 0.99);
    }

    #[test]
    fn restart_reseeds_worse_half() {
        let mut db = IslandDatabase::empty(2, params(0.5));
        db.insert_into(0, member(0.1, 0.9, 0));
        db.insert_into(1, member(0.2, 0.1, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(db.restart_islands(&mut rng), vec![0]);
        assert_eq!(db.islands[0].best().unwrap().eval_count_at_birth, 1);
        assert_eq!(db.islands[1].best().unwrap().eval_count_at_birth, 1);

        let mut tied = IslandDatabase::empty(4, params(0.5));
        for i in 0..4 {
            tied.insert_into(i, member(i as f64 / 10.0, 0.3, i as u64));
        }
        assert_eq!(tied.restart_islands(&mut rng), vec![0, 1]);
    }

    #[test]
    fn identical_candidates_fill_one_island() {
        let spec = |f| AlgorithmSpec::dsl(Expr::feature(f));
        let cands: Vec<ScoredAlgorithm> = [FeatureId::DistToCurrent, FeatureId::DistToDestination, FeatureId::RemainingCount]
            .into_iter()
            .enumerate()
            .map(|(i, f)| ScoredAlgorithm {
                spec: spec(f),
                fitness: 0.1 * (i + 1) as f64,
                trajs: vec![traj(&[0.5])],
                eval_count_at_birth: i as u64,
            })
            .collect();
        let db = IslandDatabase::from_initial(cands, 3, params(0.5), &cmp()).unwrap();
        assert_eq!(db.islands[0].len(), 3);
        for isl in &db.islands[1..] {
            assert_eq!(isl.len(), 1);
            assert_eq!(isl.best().unwrap().eval_count_at_birth, 0);
        }
    }
}
