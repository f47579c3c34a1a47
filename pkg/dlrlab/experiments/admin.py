from django.contrib import admin
from .models import ExperimentRun, TrialResult


class TrialResultInline(admin.TabularInline):
    model = TrialResult
    extra = 0
    fields = ('experiment', 'algorithm', 'hidden_units', 'seed', 'epochs_to_threshold', 'reached', 'final_accuracy')
    readonly_fields = fields
    can_delete = False


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = ('run_id', 'command', 'status', 'trial_count', 'output_dir', 'created_at')
    list_filter = ('command', 'status', 'created_at')
    search_fields = ('run_id', 'output_dir')
    readonly_fields = ('run_id', 'created_at', 'updated_at', 'trial_count')
    ordering = ('-created_at',)
    inlines = [TrialResultInline]

    fieldsets = (
        (None, {
            'fields': ('run_id', 'command', 'status', 'output_dir')
        }),
        ('Results', {
            'fields': ('summary', 'manifest'),
            'classes': ('wide',)
        }),
        ('Metadata', {
            'fields': ('created_at', 'updated_at', 'trial_count'),
            'classes': ('collapse',)
        }),
    )


@admin.register(TrialResult)
class TrialResultAdmin(admin.ModelAdmin):
    list_display = ('trial_id', 'run', 'experiment', 'algorithm', 'hidden_units', 'seed', 'epochs_to_threshold', 'reached')
    list_filter = ('experiment', 'algorithm', 'reached')
    search_fields = ('run__run_id', 'algorithm')
    readonly_fields = ('trial_id', 'created_at')
    ordering = ('run', 'experiment', 'algorithm', 'hidden_units', 'seed')
