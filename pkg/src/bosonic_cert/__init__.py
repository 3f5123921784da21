from bosonic_cert.certifier import CertificationReport, ComplexityParams, certify
from bosonic_cert.code_states import *
from bosonic_cert.exceptions import *
from bosonic_cert.fock_algebra import DensityMatrix, FockVector, State
from bosonic_cert.measurement_sim import MeasurementRecord, sample_setting
from bosonic_cert.types import *
from bosonic_cert.witnesses import *
