"""Simulators and optimizers for waveguide-fed pinching-antenna systems."""

from .config import (
    BlockageModel,
    Point3,
    Region,
    SystemConfig,
    WaveguideLayout,
    db_to_linear,
    dbm_to_watt,
    load_config,
    watt_to_dbm,
)
from .channel import (
    channel_array,
    channel_multi_waveguide,
    channel_single,
    free_space_gain,
    in_waveguide_gain,
    rate_from_snr,
)
from .siso import (
    asymptotic_rate_gap,
    expected_rate_gap_blockage,
    expected_rate_gap_los,
    grid_oracle_siso,
    max_region_side,
    monte_carlo_rate_gap,
    optimal_position_siso,
    optimal_x_closed_form,
    siso_snr,
)
from .multiuser import (
    InfeasibleError,
    NomaSolution,
    TdmaAllocation,
    cr_noma_two_user,
    noma_grid_oracle,
    tdma_dynamic_sum_rate,
    tdma_maxmin_closed_form,
    tdma_maxmin_grid_oracle,
)
from .arraywg import (
    ArrayPlacement,
    NomaArrayResult,
    TdmaArrayResult,
    TimeShares,
    aligned_array,
    maxmin_time_shares,
    noma_array_bcd,
    stage1_min_pathloss,
    stage2_phase_align,
    tdma_array_maxmin,
)
from .multiwg import (
    BeamformingSolution,
    mrt_single_user,
    sum_rate,
    two_stage_mrt_wmmse,
    ula_baseline,
    wmmse_bcd,
)
from .isac import (
    IsacScene,
    IsacSolution,
    comm_rate,
    isac_midpoint_baseline,
    isac_optimize,
    isac_receive_placement,
    isac_sweep,
    sensing_snr,
)
from .coop import SCHEMES, CoopConfig, coop_best_scheme, coop_snr
from .harness import (
    CSV_HEADER,
    FIGURES,
    ExperimentRecord,
    ExperimentSpec,
    OracleCheck,
    OracleReport,
    records_to_csv,
    reproduce,
    run_experiment,
    run_oracles,
    write_csv,
)

__version__ = "0.1.0"
