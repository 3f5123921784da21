from bosonic_cert.code_states.base import *
from bosonic_cert.code_states.cat import *
from bosonic_cert.code_states.gaussian import *
from bosonic_cert.code_states.gkp import *
from bosonic_cert.code_states.loss import *
from bosonic_cert.code_states.multimode import *
