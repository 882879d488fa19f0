//! Launch and workspace planning.
//!
//! These planners reproduce the sizing decisions a GPU backend makes before
//! launching a fused batch solver kernel: how wide one work-group should be,
//! which sub-group width to run it at, and which solver vectors fit in the
//! fast scratch memory a group owns. On the CPU the plans drive the row
//! chunking of the fused loops and are reported alongside benchmark results;
//! the planning logic itself is backend-independent arithmetic.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::solver::SolverKind;

/// Sub-group widths the planner may choose from.
pub const SUB_GROUP_SIZES: [usize; 2] = [16, 32];

/// Capabilities of the execution target that planning depends on.
///
/// The default profile models one stack of a data-center GPU: 1024-wide work
/// groups, 128 KiB of fast per-group scratch, and a 64-row threshold below
/// which the narrow sub-group wins. The threshold is a heuristic default,
/// not a measured tuning result; profiles loaded from files can override
/// every field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviceProfile {
    pub name: String,
    /// Largest work-group size the target supports.
    pub max_work_group_size: usize,
    /// Fast per-group scratch capacity in bytes.
    pub fast_memory_bytes: usize,
    /// Row count at or below which the narrow sub-group is selected.
    pub sub_group_threshold: usize,
}

impl Default for DeviceProfile {
    fn default() -> Self {
        DeviceProfile {
            name: String::from("pvc-stack"),
            max_work_group_size: 1024,
            fast_memory_bytes: 128 * 1024,
            sub_group_threshold: 64,
        }
    }
}

/// Pick the sub-group width for systems of `num_rows` rows: 16 when
/// `num_rows <= threshold` (small rows leave wide groups underfilled),
/// 32 otherwise.
pub fn select_sub_group_size(num_rows: usize, threshold: usize) -> usize {
    if num_rows <= threshold {
        16
    } else {
        32
    }
}

/// Smallest multiple of `sub_group_size` covering `num_rows`, capped at the
/// largest multiple that fits under `max_work_group_size`.
///
/// One work-group handles one batch entry; rounding to the sub-group keeps
/// every lane populated, and matrices taller than the cap are walked in
/// chunks of the returned size.
pub fn select_work_group_size(
    num_rows: usize,
    sub_group_size: usize,
    max_work_group_size: usize,
) -> Result<usize, Error> {
    if !SUB_GROUP_SIZES.contains(&sub_group_size) {
        return Err(Error::InvalidParameter(format!(
            "sub-group size {sub_group_size} not in {SUB_GROUP_SIZES:?}"
        )));
    }
    if num_rows == 0 {
        return Err(Error::InvalidParameter(String::from(
            "cannot size a work-group for 0 rows",
        )));
    }
    let cap = (max_work_group_size / sub_group_size) * sub_group_size;
    if cap == 0 {
        return Err(Error::InvalidParameter(format!(
            "device max work-group {max_work_group_size} below sub-group {sub_group_size}"
        )));
    }
    let rounded = num_rows.div_ceil(sub_group_size) * sub_group_size;
    Ok(rounded.min(cap))
}

/// Caller-pinned planning decisions; `None` fields use the planner's choice.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PlanOverrides {
    pub work_group_size: Option<usize>,
    pub sub_group_size: Option<usize>,
}

/// A fully resolved launch configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaunchPlan {
    pub work_group_size: usize,
    pub sub_group_size: usize,
    /// One line per decision recording where each number came from.
    pub notes: Vec<String>,
}

impl LaunchPlan {
    /// Compact `wg=..;sg=..` form used in benchmark records.
    pub fn summary(&self) -> String {
        format!("wg={};sg={}", self.work_group_size, self.sub_group_size)
    }
}

/// Resolve a launch plan for `num_rows`-row systems on `device`, honoring
/// any overrides after validating them.
pub fn make_launch_plan(
    num_rows: usize,
    device: &DeviceProfile,
    overrides: Option<&PlanOverrides>,
) -> Result<LaunchPlan, Error> {
    let ov = overrides.copied().unwrap_or_default();
    let mut notes = Vec::new();

    let sub_group_size = match ov.sub_group_size {
        Some(sg) => {
            if !SUB_GROUP_SIZES.contains(&sg) {
                return Err(Error::InvalidParameter(format!(
                    "sub-group override {sg} not in {SUB_GROUP_SIZES:?}"
                )));
            }
            notes.push(format!("sub-group {sg}: pinned by caller"));
            sg
        }
        None => {
            let sg = select_sub_group_size(num_rows, device.sub_group_threshold);
            notes.push(format!(
                "sub-group {sg}: {num_rows} rows {} threshold {} (heuristic default)",
                if num_rows <= device.sub_group_threshold {
                    "<="
                } else {
                    ">"
                },
                device.sub_group_threshold
            ));
            sg
        }
    };

    let work_group_size = match ov.work_group_size {
        Some(wg) => {
            if wg == 0 || wg % sub_group_size != 0 || wg > device.max_work_group_size {
                return Err(Error::InvalidParameter(format!(
                    "work-group override {wg} must be a positive multiple of {sub_group_size} \
                     no larger than device max {}",
                    device.max_work_group_size
                )));
            }
            notes.push(format!("work-group {wg}: pinned by caller"));
            wg
        }
        None => {
            let wg = select_work_group_size(num_rows, sub_group_size, device.max_work_group_size)?;
            if wg < num_rows {
                notes.push(format!(
                    "work-group {wg}: capped at device max {}, rows walked in chunks",
                    device.max_work_group_size
                ));
            } else {
                notes.push(format!(
                    "work-group {wg}: {num_rows} rows rounded up to a multiple of {sub_group_size}"
                ));
            }
            wg
        }
    };

    Ok(LaunchPlan {
        work_group_size,
        sub_group_size,
        notes,
    })
}

/// Memory tier a workspace vector is assigned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    /// Fast per-group scratch (shared local memory on a GPU).
    Fast,
    /// Ordinary global memory.
    Main,
}

/// Placement of one named workspace vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorPlacement {
    pub name: &'static str,
    pub bytes: usize,
    pub tier: Tier,
}

/// Result of [`plan_workspace`]: every solver vector with its tier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkspacePlan {
    pub placements: Vec<VectorPlacement>,
    pub fast_capacity_bytes: usize,
    pub fast_used_bytes: usize,
}

impl WorkspacePlan {
    pub fn tier_of(&self, name: &str) -> Option<Tier> {
        self.placements
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.tier)
    }

    pub fn fast_count(&self) -> usize {
        self.placements
            .iter()
            .filter(|p| p.tier == Tier::Fast)
            .count()
    }
}

/// Workspace vectors of each solver in descending access frequency. The
/// preconditioner workspace comes last: it is placed in fast memory only if
/// room remains after the solver's own vectors.
fn priority_order(kind: SolverKind) -> &'static [&'static str] {
    match kind {
        SolverKind::Cg => &["r", "z", "p", "t", "x", "precond"],
        SolverKind::Bicgstab => &["r", "p", "v", "s", "t", "z", "r_hat", "x", "precond"],
    }
}

/// Assign solver workspace vectors to memory tiers.
///
/// Walks the solver's vectors in priority order, placing each whole vector
/// (`num_rows * value_bytes` bytes) in the fast tier while it fits; the
/// first vector that does not fit closes the fast tier, so fast placements
/// are always a prefix of the priority order. Vectors are never split
/// across tiers.
pub fn plan_workspace(
    kind: SolverKind,
    num_rows: usize,
    value_bytes: usize,
    fast_capacity_bytes: usize,
) -> WorkspacePlan {
    let vec_bytes = num_rows * value_bytes;
    let mut placements = Vec::new();
    let mut used = 0usize;
    let mut fast_open = true;
    for &name in priority_order(kind) {
        let fits = fast_open && used + vec_bytes <= fast_capacity_bytes;
        if fits {
            used += vec_bytes;
        } else {
            fast_open = false;
        }
        placements.push(VectorPlacement {
            name,
            bytes: vec_bytes,
            tier: if fits { Tier::Fast } else { Tier::Main },
        });
    }
    WorkspacePlan {
        placements,
        fast_capacity_bytes,
        fast_used_bytes: used,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_group_threshold_is_inclusive() {
        assert_eq!(select_sub_group_size(54, 64), 16);
        assert_eq!(select_sub_group_size(64, 64), 16);
        assert_eq!(select_sub_group_size(65, 64), 32);
        assert_eq!(select_sub_group_size(144, 64), 32);
    }

    #[test]
    fn work_group_rounds_up_to_sub_group_multiples() {
        assert_eq!(select_work_group_size(22, 16, 1024).unwrap(), 32);
        assert_eq!(select_work_group_size(33, 16, 1024).unwrap(), 48);
        assert_eq!(select_work_group_size(54, 16, 1024).unwrap(), 64);
        assert_eq!(select_work_group_size(64, 16, 1024).unwrap(), 64);
        assert_eq!(select_work_group_size(144, 32, 1024).unwrap(), 160);
    }

    #[test]
    fn work_group_is_capped_at_device_max() {
        assert_eq!(select_work_group_size(2000, 32, 1024).unwrap(), 1024);
        // A cap that is not a sub-group multiple is lowered to one.
        assert_eq!(select_work_group_size(2000, 32, 1000).unwrap(), 992);
    }

    #[test]
    fn work_group_rejects_bad_parameters() {
        assert!(select_work_group_size(10, 15, 1024).is_err());
        assert!(select_work_group_size(0, 16, 1024).is_err());
        assert!(select_work_group_size(10, 32, 16).is_err());
    }

    #[test]
    fn launch_plan_records_decisions() {
        let dev = DeviceProfile::default();
        let plan = make_launch_plan(54, &dev, None).unwrap();
        assert_eq!(plan.work_group_size, 64);
        assert_eq!(plan.sub_group_size, 16);
        assert_eq!(plan.summary(), "wg=64;sg=16");
        assert_eq!(plan.notes.len(), 2);
        assert!(plan.notes[0].contains("threshold 64"));
        assert!(plan.notes[1].contains("rounded up"));
    }

    #[test]
    fn launch_plan_honors_and_validates_overrides() {
        let dev = DeviceProfile::default();
        let ov = PlanOverrides {
            work_group_size: Some(128),
            sub_group_size: Some(32),
        };
        let plan = make_launch_plan(54, &dev, Some(&ov)).unwrap();
        assert_eq!((plan.work_group_size, plan.sub_group_size), (128, 32));
        assert!(plan.notes.iter().all(|n| n.contains("pinned")));

        let bad_sg = PlanOverrides {
            sub_group_size: Some(24),
            ..Default::default()
        };
        assert!(make_launch_plan(54, &dev, Some(&bad_sg)).is_err());
        let bad_wg = PlanOverrides {
            work_group_size: Some(100),
            ..Default::default()
        };
        // 100 is not a multiple of the selected sub-group 16.
        assert!(make_launch_plan(54, &dev, Some(&bad_wg)).is_err());
        let too_big = PlanOverrides {
            work_group_size: Some(2048),
            ..Default::default()
        };
        assert!(make_launch_plan(54, &dev, Some(&too_big)).is_err());
    }

    #[test]
    fn workspace_plan_fills_a_prefix_in_priority_order() {
        // Capacity for exactly three 54-row f64 vectors.
        let plan = plan_workspace(SolverKind::Cg, 54, 8, 3 * 54 * 8);
        let names: Vec<_> = plan.placements.iter().map(|p| p.name).collect();
        assert_eq!(names, ["r", "z", "p", "t", "x", "precond"]);
        let tiers: Vec<_> = plan.placements.iter().map(|p| p.tier).collect();
        assert_eq!(
            tiers,
            [
                Tier::Fast,
                Tier::Fast,
                Tier::Fast,
                Tier::Main,
                Tier::Main,
                Tier::Main
            ]
        );
        assert_eq!(plan.fast_used_bytes, 3 * 54 * 8);
    }

    #[test]
    fn workspace_plan_places_everything_fast_when_it_fits() {
        let plan = plan_workspace(SolverKind::Cg, 54, 8, 128 * 1024);
        assert_eq!(plan.fast_count(), 6);
        assert_eq!(plan.tier_of("precond"), Some(Tier::Fast));
        assert_eq!(plan.fast_used_bytes, 6 * 54 * 8);
    }

    #[test]
    fn workspace_plan_handles_zero_capacity() {
        let plan = plan_workspace(SolverKind::Bicgstab, 54, 8, 0);
        assert_eq!(plan.fast_count(), 0);
        assert_eq!(plan.fast_used_bytes, 0);
    }

    #[test]
    fn bicgstab_priority_order_is_fixed() {
        // Capacity for four vectors: the fast set must be the first four.
        let plan = plan_workspace(SolverKind::Bicgstab, 10, 8, 4 * 80);
        let fast: Vec<_> = plan
            .placements
            .iter()
            .filter(|p| p.tier == Tier::Fast)
            .map(|p| p.name)
            .collect();
        assert_eq!(fast, ["r", "p", "v", "s"]);
        assert_eq!(plan.tier_of("r_hat"), Some(Tier::Main));
        assert_eq!(plan.tier_of("precond"), Some(Tier::Main));
    }

    #[test]
    fn prefix_rule_blocks_later_smaller_fits() {
        // All vectors are the same size, so the prefix rule is equivalent to
        // greedy here; this pins the rule itself: once one vector misses,
        // nothing after it is placed fast even though it would fit.
        let plan = plan_workspace(SolverKind::Cg, 10, 8, 2 * 80 + 40);
        assert_eq!(plan.fast_count(), 2);
        assert_eq!(plan.fast_used_bytes, 160);
    }
}
