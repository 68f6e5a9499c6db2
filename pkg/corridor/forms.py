import logging

from django import forms
from django.core.exceptions import ValidationError

from corridor.compliance import ComplianceSpec, LinkCompliance
from corridor.dynamics import DemandSpec
from corridor.network import LinkSpec, NetworkSpec
from corridor.scenario import RegionGrid, SimulationSettings, SolverSettings, SweepGrid

logger = logging.getLogger(__name__)


def positive(value):
    if not value > 0:
        raise ValidationError("Ensure this value is greater than 0.")


class SectionForm(forms.Form):
    ''' Validates one section of a scenario file.

    Subclasses build the section's domain object in build(); a ValueError
    raised by its constructor becomes a non-field error.
    '''

    def build(self):
        raise NotImplementedError

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        try:
            cleaned_data['built'] = self.build()
        except ValueError as e:
            raise ValidationError(str(e))
        return cleaned_data


class NetworkForm(SectionForm):
    e0_length = forms.FloatField(validators=[positive])
    e0_v = forms.FloatField(validators=[positive])
    e0_q = forms.FloatField(min_value=0)
    e1_length = forms.FloatField(validators=[positive])
    e1_v = forms.FloatField(validators=[positive])
    e1_q = forms.FloatField(min_value=0)
    e1_r = forms.FloatField(validators=[positive])
    e1_w = forms.FloatField(validators=[positive])
    e2_length = forms.FloatField(validators=[positive])
    e2_v = forms.FloatField(validators=[positive])
    e2_q = forms.FloatField(min_value=0)
    e2_r = forms.FloatField(validators=[positive])
    e2_w = forms.FloatField(validators=[positive])
    # Blank routes in proportion to the capacities of e1 and e2
    alpha = forms.FloatField(required=False, min_value=0, max_value=1)
    dt = forms.FloatField(validators=[positive])

    def build(self):
        data = self.cleaned_data
        links = {'e0': LinkSpec.buffer(data['e0_length'], data['e0_v'], data['e0_q'])}
        for name in ('e1', 'e2'):
            links[name] = LinkSpec.routed(
                data[f'{name}_length'], data[f'{name}_v'], data[f'{name}_q'],
                data[f'{name}_r'], data[f'{name}_w'],
            )
        return NetworkSpec(dt=data['dt'], alpha=data['alpha'], **links)


class ComplianceForm(SectionForm):
    e1_beta0 = forms.FloatField()
    e1_beta1 = forms.FloatField()
    e1_beta2 = forms.FloatField()
    e1_beta3 = forms.FloatField()
    e1_eps = forms.FloatField(min_value=0, max_value=1)
    e2_beta0 = forms.FloatField()
    e2_beta1 = forms.FloatField()
    e2_beta2 = forms.FloatField()
    e2_beta3 = forms.FloatField()
    e2_eps = forms.FloatField(min_value=0, max_value=1)

    def build(self):
        data = self.cleaned_data
        links = {
            name: LinkCompliance(**{
                field: data[f'{name}_{field}']
                for field in ('beta0', 'beta1', 'beta2', 'beta3', 'eps')
            })
            for name in ('e1', 'e2')
        }
        spec = ComplianceSpec(**links)
        for violation in spec.monotonicity_violations():
            logger.warning("compliance mean is not monotone as assumed: %s", violation)
        return spec


class DemandForm(SectionForm):
    d_min = forms.FloatField(min_value=0)
    d_max = forms.FloatField(min_value=0)

    def build(self):
        return DemandSpec(self.cleaned_data['d_min'], self.cleaned_data['d_max'])


class PolicyForm(SectionForm):
    toll = forms.FloatField(min_value=0)

    def build(self):
        return self.cleaned_data['toll']


class SolverForm(SectionForm):
    resolution = forms.IntegerField(min_value=2)
    quadrature_nodes = forms.IntegerField(min_value=1)
    lipschitz_inflation = forms.FloatField(min_value=1)
    bisection_tol = forms.FloatField(validators=[positive])
    dbar_low = forms.FloatField(min_value=0)
    dbar_high = forms.FloatField(min_value=0)

    def build(self):
        data = self.cleaned_data
        if not data['dbar_low'] < data['dbar_high']:
            raise ValueError("dbar_low must be below dbar_high")
        return SolverSettings(**{name: data[name] for name in self.fields})


class SimulationForm(SectionForm):
    horizon = forms.IntegerField(min_value=2)
    seeds = forms.IntegerField(min_value=1)
    seed = forms.IntegerField(min_value=0)
    threshold = forms.FloatField(validators=[positive])
    slope_tolerance = forms.FloatField(min_value=0)

    def build(self):
        return SimulationSettings(**{name: self.cleaned_data[name] for name in self.fields})


def _check_range(data, prefix):
    if not data[f'{prefix}_min'] <= data[f'{prefix}_max']:
        raise ValueError(f"{prefix}_min must not exceed {prefix}_max")


class SweepForm(SectionForm):
    p_min = forms.FloatField(min_value=0)
    p_max = forms.FloatField(min_value=0)
    p_step = forms.FloatField(validators=[positive])

    def build(self):
        _check_range(self.cleaned_data, 'p')
        return SweepGrid(**{name: self.cleaned_data[name] for name in self.fields})


class RegionForm(SectionForm):
    p_min = forms.FloatField(min_value=0)
    p_max = forms.FloatField(min_value=0)
    p_step = forms.FloatField(validators=[positive])
    dbar_min = forms.FloatField(min_value=0)
    dbar_max = forms.FloatField(min_value=0)
    dbar_step = forms.FloatField(validators=[positive])
    simulate = forms.BooleanField(required=False)

    def build(self):
        _check_range(self.cleaned_data, 'p')
        _check_range(self.cleaned_data, 'dbar')
        return RegionGrid(**{name: self.cleaned_data[name] for name in self.fields})


SECTION_FORMS = {
    'network': NetworkForm,
    'compliance': ComplianceForm,
    'demand': DemandForm,
    'policy': PolicyForm,
    'solver': SolverForm,
    'simulation': SimulationForm,
    'sweep': SweepForm,
    'region': RegionForm,
}
