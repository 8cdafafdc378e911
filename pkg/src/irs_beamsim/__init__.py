"""Environment-aware joint active/passive beam selection for IRS-aided links.

A beam index map stores, for surveyed UE locations, the best (IRS beam,
BS beam) pair; online selection then needs only the UE location plus,
optionally, a short sweep over the neighbours' pairs.
"""
from ._accel import BACKEND
from .beamsearch import NoiseModel, SearchResult, exhaustive_search, fft_search, noisy_measure, sweep_candidates
from .bim import BIMDatabase, build_bim, knn, load_bim, save_bim, vote
from .channel import UPAConfig, beam_gain, cascade, synth_channel, upa_response
from .codebook import BeamPair, Codebook, make_bs_codebook, make_irs_codebook
from .env_model import (Blocker, PathComponent, PathSet, Scatterer, SiteLayout, UEArea,
                        export_paths, import_paths, sample_ue_locations, segment_blocked, trace_paths)
from .schemes import LinkBudget, SchemeOutcome, effective_rate

__version__ = "0.1.0"
